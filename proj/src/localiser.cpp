#include "speclocal/localiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCore>

#include "speclocal/error.hpp"
#include "speclocal/oracles.hpp"

namespace speclocal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int copies_of(const ModelInstance& model) { return model.parity == Parity::Odd ? 2 : 1; }

std::vector<Index> stacked(const std::vector<Index>& idx, Index dim, int copies) {
  std::vector<Index> out;
  out.reserve(idx.size() * static_cast<std::size_t>(copies));
  for (int c = 0; c < copies; ++c) {
    for (Index i : idx) out.push_back(c * dim + i);
  }
  return out;
}

Matrix stacked_basis(const Matrix& v, int copies) {
  Matrix out = Matrix::Zero(copies * v.rows(), copies * v.cols());
  for (int c = 0; c < copies; ++c) out.block(c * v.rows(), c * v.cols(), v.rows(), v.cols()) = v;
  return out;
}

std::vector<Index> interior_indices(const ModelInstance& model) {
  std::vector<Index> idx;
  for (Index i = 0; i < model.dim(); ++i) {
    if (model.interior.empty() || model.interior[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  return idx;
}

const CommutatorNorm& commutator_of(const ModelInstance& model, CommutatorNorm& scratch) {
  if (model.commutator) return *model.commutator;
  scratch = commutator_norm(model.dirac().matrix(), model.k_rep, model.interior);
  return scratch;
}

Certificate gap_certificate(std::string name, double measured, double bound, double zero_tol,
                            Mode mode, bool required) {
  Certificate c;
  c.name = std::move(name);
  c.relation = ">=";
  c.measured = measured;
  c.bound = bound;
  c.holds = measured >= bound - kGapSlack;
  c.satisfied = mode == Mode::Strict ? c.holds : measured > zero_tol;
  c.required = required;
  return c;
}

void check_params(const LocaliserParams& params) {
  if (!(params.kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  if (!(params.rho > 0.0)) fail(ErrorCode::InvalidArgument, "rho must be > 0");
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::Strict ? "strict" : "permissive"; }

Mode parse_mode(const std::string& s) {
  if (s == "strict") return Mode::Strict;
  if (s == "permissive") return Mode::Permissive;
  fail(ErrorCode::ConfigError, "mode must be strict or permissive, got '" + s + "'");
}

HermitianOperator build_even_localiser(const Matrix& h, const GradedOperator& d, double kappa) {
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  if (h.rows() != d.dim() || h.cols() != d.dim()) {
    fail(ErrorCode::DimensionMismatch, "build_even_localiser: H is " + std::to_string(h.rows()) +
                                           "x" + std::to_string(h.cols()) + ", D has dim " +
                                           std::to_string(d.dim()));
  }
  const auto& grading = d.grading();
  const double scale = std::max(1.0, linalg::max_abs(h));
  for (Index j = 0; j < h.cols(); ++j) {
    for (Index i = 0; i < h.rows(); ++i) {
      if (grading[static_cast<std::size_t>(i)] != grading[static_cast<std::size_t>(j)] &&
          std::abs(h(i, j)) > 1e-12 * scale) {
        fail(ErrorCode::InvalidArgument, "build_even_localiser: H does not commute with the grading");
      }
    }
  }
  Matrix l = kappa * d.matrix();
  for (Index i = 0; i < l.rows(); ++i) {
    l.row(i) += static_cast<double>(grading[static_cast<std::size_t>(i)]) * h.row(i);
  }
  return HermitianOperator(std::move(l));
}

HermitianOperator build_odd_localiser(const Matrix& g, const HermitianOperator& d, double kappa) {
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  if (g.rows() != d.dim() || g.cols() != d.dim()) {
    fail(ErrorCode::DimensionMismatch, "build_odd_localiser: G is " + std::to_string(g.rows()) +
                                           "x" + std::to_string(g.cols()) + ", D has dim " +
                                           std::to_string(d.dim()));
  }
  const Index n = d.dim();
  Matrix l(2 * n, 2 * n);
  l.topLeftCorner(n, n) = kappa * d.matrix();
  l.topRightCorner(n, n) = g;
  l.bottomLeftCorner(n, n) = g.adjoint();
  l.bottomRightCorner(n, n) = -kappa * d.matrix();
  return HermitianOperator(std::move(l));
}

HermitianOperator build_localiser(const ModelInstance& model, double kappa) {
  if (model.parity == Parity::Even) {
    if (!model.graded_dirac) fail(ErrorCode::ValidationError, "even model without a grading");
    return build_even_localiser(model.k_rep, *model.graded_dirac, kappa);
  }
  return build_odd_localiser(model.k_rep, model.dirac(), kappa);
}

Certificate validate_infinite_regime(const ModelInstance& model, double kappa, Mode mode) {
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  CommutatorNorm scratch;
  const double c = commutator_of(model, scratch).interior;
  const double g = model.k_rep_gap;
  const bool hypothesis = c == 0.0 || kappa < g * g / c;
  if (!hypothesis) {
    std::ostringstream os;
    os << "kappa = " << kappa << " is not below g^2/||[D,H]|| = " << g * g / c;
    if (mode == Mode::Strict) fail(ErrorCode::HypothesisViolated, os.str());
    Certificate cert;
    cert.name = "full_box_gap";
    cert.relation = ">=";
    cert.measured = kNaN;
    cert.bound = kNaN;
    cert.holds = false;
    cert.satisfied = true;
    cert.required = false;
    cert.note = os.str() + "; not measured";
    return cert;
  }
  const double bound = std::sqrt(std::max(0.0, g * g - kappa * c));
  const HermitianOperator l = build_localiser(model, kappa);
  const auto idx = stacked(interior_indices(model), model.dim(), copies_of(model));
  const RealVector w = linalg::eigenvalues_hermitian(compress(l.matrix(), idx));
  const double measured = w.cwiseAbs().minCoeff();
  const double zero_tol = 1e-8 * w.cwiseAbs().maxCoeff();
  Certificate cert = gap_certificate("full_box_gap", measured, bound, zero_tol, mode,
                                     mode == Mode::Strict);
  cert.note = "interior compression of the untruncated localiser";
  return cert;
}

std::vector<Certificate> validate_truncation_params(const ModelInstance& model,
                                                    const LocaliserParams& params) {
  check_params(params);
  const bool strict = params.mode == Mode::Strict;
  CommutatorNorm scratch;
  const double c = model.commutator || strict ? commutator_of(model, scratch).interior : kNaN;
  const double g = model.k_rep_gap;
  const double h_norm = model.k_rep_norm;
  const double kappa = params.kappa;
  const double rho = params.rho;

  std::vector<Certificate> out;
  auto add = [&](std::string name, std::string rel, double measured, double bound, bool holds,
                 bool required, std::string note) {
    Certificate cert;
    cert.name = std::move(name);
    cert.relation = std::move(rel);
    cert.measured = measured;
    cert.bound = bound;
    cert.holds = holds;
    cert.satisfied = holds;
    cert.required = required;
    cert.note = std::move(note);
    out.push_back(std::move(cert));
  };

  if (std::isnan(c)) {
    add("kappa_bound", "<=", kappa, kNaN, false, false, "commutator norm not computed");
  } else {
    const double kappa_max = c == 0.0 ? kInf : g * g * g / (12.0 * h_norm * c);
    add("kappa_bound", "<=", kappa, kappa_max, kappa <= kappa_max * (1.0 + 1e-12), strict,
        "kappa <= g^3 / (12 ||H|| ||[D,H]||)");
  }
  const double rho_min = 2.0 * g / kappa;
  add("rho_bound", ">", rho, rho_min, rho > rho_min, strict, "rho > 2 g / kappa");
  const double coupling = std::sqrt(0.5 * g * std::sqrt(47.0 / 48.0) * kappa * rho);
  add("coupling", "<", h_norm, coupling, h_norm < coupling, false,
      "||H|| < sqrt(g/2 * sqrt(47/48) kappa rho); advisory");
  const double endpoint = std::max(1.0, h_norm);
  add("endpoint", "<", endpoint, kappa * rho, endpoint < kappa * rho, false,
      "max(1, ||H||) < kappa rho; advisory");

  if (strict) {
    std::string failed;
    for (const auto& cert : out) {
      if (cert.required && !cert.satisfied) {
        std::ostringstream os;
        os << (failed.empty() ? "" : "; ") << cert.name << ": " << cert.measured << " "
           << cert.relation << " " << cert.bound << " fails";
        failed += os.str();
      }
    }
    if (!failed.empty()) fail(ErrorCode::StrictModeViolation, failed);
  }
  return out;
}

SpectralWindow spectral_window(const HermitianOperator& d, double rho, double eig_sep_tol) {
  if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "spectral_window: rho must be > 0");
  SpectralWindow win;
  win.rho = rho;
  const Matrix& m = d.matrix();
  const Index n = d.dim();

  Index nnz = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) nnz += m(i, j) != Complex(0.0) ? 1 : 0;
  }
  bool square_diagonal = false;
  RealVector d2(n);
  if (nnz <= 8 * n) {
    const Eigen::SparseMatrix<Complex> s = m.sparseView();
    const Eigen::SparseMatrix<Complex> s2 = s * s;
    square_diagonal = true;
    d2.setZero();
    const double scale = std::max(1.0, linalg::max_abs(m));
    for (Index k = 0; k < s2.outerSize(); ++k) {
      for (Eigen::SparseMatrix<Complex>::InnerIterator it(s2, k); it; ++it) {
        if (it.row() == it.col()) {
          d2(it.row()) = it.value().real();
        } else if (std::abs(it.value()) > 1e-14 * scale * scale) {
          square_diagonal = false;
        }
      }
    }
  }

  if (square_diagonal) {
    for (Index i = 0; i < n; ++i) {
      const double lambda = std::sqrt(std::max(0.0, d2(i)));
      if (std::abs(lambda - rho) < eig_sep_tol) {
        std::ostringstream os;
        os << "|D| eigenvalue " << lambda << " lies within " << eig_sep_tol << " of rho=" << rho;
        fail(ErrorCode::BoundaryEigenvalue, os.str());
      }
      (lambda <= rho ? win.indices : win.complement).push_back(i);
    }
    win.rank = static_cast<Index>(win.indices.size());
    return win;
  }

  const auto eig = linalg::eigen_hermitian(m);
  std::vector<Index> in, out;
  for (Index i = 0; i < n; ++i) {
    const double v = eig.values(i);
    if (std::abs(std::abs(v) - rho) < eig_sep_tol) {
      std::ostringstream os;
      os << "eigenvalue " << v << " lies within " << eig_sep_tol << " of +-" << rho;
      fail(ErrorCode::BoundaryEigenvalue, os.str());
    }
    (std::abs(v) <= rho ? in : out).push_back(i);
  }
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  win.basis = compress(eig.vectors, rows, in);
  win.complement_basis = compress(eig.vectors, rows, out);
  win.rank = static_cast<Index>(in.size());
  return win;
}

Matrix compress_to_window(const Matrix& op, const SpectralWindow& window, int copies) {
  if (window.basis) {
    const Index n = window.basis->rows();
    if (op.rows() != copies * n) fail(ErrorCode::DimensionMismatch, "compress_to_window");
    const Matrix v = stacked_basis(*window.basis, copies);
    return v.adjoint() * op * v;
  }
  const Index n = static_cast<Index>(window.indices.size() + window.complement.size());
  if (op.rows() != copies * n) fail(ErrorCode::DimensionMismatch, "compress_to_window");
  return compress(op, stacked(window.indices, n, copies));
}

TruncatedLocaliser truncate(const ModelInstance& model, const HermitianOperator& localiser,
                            const LocaliserParams& params, const TruncateOptions& options) {
  check_params(params);
  if (params.rho > model.containment_radius) {
    std::ostringstream os;
    os << "rho = " << params.rho << " exceeds the containment radius " << model.containment_radius;
    fail(ErrorCode::ContainmentViolation, os.str());
  }
  const int copies = copies_of(model);
  if (localiser.dim() != copies * model.dim()) {
    fail(ErrorCode::DimensionMismatch, "truncate: localiser does not act on the model space");
  }
  SpectralWindow window = spectral_window(model.dirac(), params.rho);
  if (window.rank == 0) fail(ErrorCode::InvalidArgument, "truncate: empty spectral window");
  HermitianOperator matrix(compress_to_window(localiser.matrix(), window, copies));
  SpectrumInertia spectrum = inertia_and_spectrum(matrix);

  const double measured = spectrum.eigenvalues.cwiseAbs().minCoeff();
  std::vector<Certificate> certs;
  Certificate gap = gap_certificate("truncated_gap", measured, 0.5 * model.k_rep_gap,
                                    spectrum.zero_tol, params.mode, true);
  gap.note = params.mode == Mode::Strict ? "bound g/2"
                                         : "bound g/2 advisory; empirical gap > zero_tol required";
  certs.push_back(std::move(gap));

  if (options.complement || params.mode == Mode::Strict) {
    certs.push_back(complement_block(model, localiser, params).second);
  }
  const Index rank = matrix.dim();
  return TruncatedLocaliser{std::move(matrix), rank, params, std::move(window), std::move(spectrum),
                            std::move(certs)};
}

std::pair<std::optional<HermitianOperator>, Certificate> complement_block(
    const ModelInstance& model, const HermitianOperator& localiser, const LocaliserParams& params) {
  check_params(params);
  if (params.rho > model.containment_radius) {
    std::ostringstream os;
    os << "rho = " << params.rho << " exceeds the containment radius " << model.containment_radius;
    fail(ErrorCode::ContainmentViolation, os.str());
  }
  const int copies = copies_of(model);
  const SpectralWindow window = spectral_window(model.dirac(), params.rho);
  const double bound = std::sqrt(47.0 / 48.0) * params.kappa * params.rho;

  Matrix block;
  if (window.complement_basis) {
    const Matrix v = stacked_basis(*window.complement_basis, copies);
    block = v.adjoint() * localiser.matrix() * v;
  } else {
    std::vector<Index> idx;
    for (Index i : window.complement) {
      if (model.interior.empty() || model.interior[static_cast<std::size_t>(i)]) idx.push_back(i);
    }
    block = compress(localiser.matrix(), stacked(idx, model.dim(), copies));
  }
  if (block.rows() == 0) {
    Certificate cert = gap_certificate("complement_gap", kInf, bound, 0.0, params.mode,
                                       params.mode == Mode::Strict);
    cert.note = "empty complement within the interior";
    return {std::nullopt, cert};
  }
  HermitianOperator op(std::move(block));
  const RealVector w = linalg::eigenvalues_hermitian(op.matrix());
  Certificate cert = gap_certificate("complement_gap", w.cwiseAbs().minCoeff(), bound,
                                     1e-8 * w.cwiseAbs().maxCoeff(), params.mode,
                                     params.mode == Mode::Strict);
  cert.note = "complement within the box, interior indices only";
  return {std::move(op), cert};
}

namespace {

PairingResult pairing_impl(const ModelInstance& model, const LocaliserParams& params,
                           const PairingOptions& options) {
  check_params(params);
  PairingResult result;
  result.certificates = validate_truncation_params(model, params);
  if (options.full_box_certificate) {
    result.certificates.push_back(validate_infinite_regime(model, params.kappa, params.mode));
  }
  const HermitianOperator l = build_localiser(model, params.kappa);
  const TruncatedLocaliser t =
      truncate(model, l, params, TruncateOptions{options.complement_certificate});
  for (const auto& c : t.certificates) result.certificates.push_back(c);

  if (params.mode == Mode::Strict) {
    std::string failed;
    for (const auto& c : result.certificates) {
      if (c.required && !c.satisfied) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    if (!failed.empty()) fail(ErrorCode::StrictModeViolation, "failed certificates: " + failed);
  }

  result.inertia = t.spectrum.inertia;
  result.rank = t.rank;
  result.truncated_gap = t.spectrum.eigenvalues.cwiseAbs().minCoeff();
  result.signature = result.inertia.signature();

  if (model.parity == Parity::Even) {
    result.index_correction = fredholm_index_graded(*model.graded_dirac, params.rho).index;
  }
  const long total = static_cast<long>(result.signature) + result.index_correction;
  if (total % 2 != 0) {
    std::ostringstream os;
    os << "Sig = " << result.signature << " and Index(D+) = " << result.index_correction
       << " do not sum to an even integer";
    fail(ErrorCode::IntegerityViolation, os.str());
  }
  result.value = total / 2;
  return result;
}

}  // namespace

PairingResult pairing_even(const ModelInstance& model, const LocaliserParams& params,
                           const PairingOptions& options) {
  if (model.parity != Parity::Even) fail(ErrorCode::InvalidArgument, "pairing_even on an odd model");
  return pairing_impl(model, params, options);
}

PairingResult pairing_odd(const ModelInstance& model, const LocaliserParams& params,
                          const PairingOptions& options) {
  if (model.parity != Parity::Odd) fail(ErrorCode::InvalidArgument, "pairing_odd on an even model");
  return pairing_impl(model, params, options);
}

PairingResult pairing(const ModelInstance& model, const LocaliserParams& params,
                      const PairingOptions& options) {
  return pairing_impl(model, params, options);
}

}  // namespace speclocal
