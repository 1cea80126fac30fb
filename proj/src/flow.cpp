#include "speclocal/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "speclocal/error.hpp"
#include "speclocal/localiser.hpp"

namespace speclocal {

OperatorPath::OperatorPath(std::vector<double> g, std::function<HermitianOperator(double)> f)
    : grid(std::move(g)), evaluate(std::move(f)) {
  if (grid.size() < 2) fail(ErrorCode::InvalidArgument, "OperatorPath needs at least two grid points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      fail(ErrorCode::InvalidArgument, "OperatorPath grid must be strictly increasing");
    }
  }
  dim = evaluate(grid.front()).dim();
}

std::vector<double> uniform_grid(double a, double b, int points) {
  if (points < 2 || !(b > a)) fail(ErrorCode::InvalidArgument, "uniform_grid: need b > a, points >= 2");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (points - 1);
  g.back() = b;
  return g;
}

OperatorPath straight_line(const HermitianOperator& t0, const HermitianOperator& t1, int points) {
  if (t0.dim() != t1.dim()) fail(ErrorCode::DimensionMismatch, "straight_line: endpoint dims differ");
  const Matrix a = t0.matrix();
  const Matrix b = t1.matrix();
  return OperatorPath(uniform_grid(0.0, 1.0, points), [a, b](double s) {
    return HermitianOperator((1.0 - s) * a + s * b, 0.0);
  });
}

ChiPair ChiPair::clamp() {
  return ChiPair{"clamp", [](double t) { return std::clamp(t, 0.0, 1.0); },
                 [](double t) { return std::clamp(-t, 0.0, 1.0); }};
}

ChiPair ChiPair::smooth() {
  auto s = [](double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
  };
  return ChiPair{"smooth", [s](double t) { return s(t); }, [s](double t) { return s(-t); }};
}

void validate_chi(const ChiPair& chi) {
  if (!chi.plus || !chi.minus) fail(ErrorCode::InvalidArgument, "chi pair is incomplete");
  if (std::abs(chi.plus(1.0) - 1.0) > 1e-14 || std::abs(chi.minus(-1.0) - 1.0) > 1e-14) {
    fail(ErrorCode::InvalidArgument, "chi pair must satisfy chi+(1) = chi-(-1) = 1");
  }
  for (int i = 0; i <= 200; ++i) {
    const double t = -1.0 + i / 100.0;
    const double p = chi.plus(t);
    const double m = chi.minus(t);
    if (p < 0.0 || p > 1.0 || m < 0.0 || m > 1.0) {
      fail(ErrorCode::InvalidArgument, "chi pair values must lie in [0, 1]");
    }
    if ((t < 0.0 && p != 0.0) || (t > 0.0 && m != 0.0)) {
      fail(ErrorCode::InvalidArgument, "chi+ must vanish for t < 0 and chi- for t > 0");
    }
  }
}

long sf_endpoints(const HermitianOperator& t0, const HermitianOperator& t1) {
  if (t0.dim() != t1.dim()) fail(ErrorCode::DimensionMismatch, "sf_endpoints: dims differ");
  const Index s0 = inertia(t0).signature();
  const Index s1 = inertia(t1).signature();
  return static_cast<long>(s1 - s0) / 2;
}

SfResult sf_crossings(const OperatorPath& path, const SfOptions& options) {
  SfResult result;
  result.samples = path.grid;
  std::vector<RealVector> spectra =
      kernels::sample_spectra(path.evaluate, path.grid, options.execution, options.workers);
  for (const auto& w : spectra) {
    if (w.size() != path.dim) fail(ErrorCode::DimensionMismatch, "path dimension changes along the grid");
  }
  const double norm = std::max(spectra.front().cwiseAbs().maxCoeff(),
                               spectra.back().cwiseAbs().maxCoeff());
  const double eps = options.epsilon.value_or(1e-6 * norm);
  result.epsilon = eps;

  auto gap = [](const RealVector& w) { return w.cwiseAbs().minCoeff(); };
  const std::size_t last = spectra.size() - 1;
  if (gap(spectra.front()) < eps || gap(spectra.back()) < eps) {
    fail(ErrorCode::SingularMatrix, "spectral flow path has a non-invertible endpoint");
  }

  for (std::size_t i = 1; i < last; ++i) {
    if (gap(spectra[i]) >= eps) continue;
    const double t = path.grid[i];
    const double left = t - path.grid[i - 1];
    const double right = path.grid[i + 1] - t;
    bool replaced = false;
    for (int depth = 1; depth <= options.max_depth && !replaced; ++depth) {
      const double scale = std::ldexp(1.0, -depth);
      for (double candidate : {t - left * scale, t + right * scale}) {
        RealVector w = linalg::eigenvalues_hermitian(path.evaluate(candidate).matrix());
        if (gap(w) >= eps) {
          result.samples[i] = candidate;
          spectra[i] = std::move(w);
          replaced = true;
          ++result.replaced_samples;
          break;
        }
      }
    }
    if (!replaced) {
      std::ostringstream os;
      os << "an eigenvalue stays below epsilon = " << eps << " throughout ["
         << path.grid[i - 1] << ", " << path.grid[i + 1] << "]";
      fail(ErrorCode::RefinementLimit, os.str());
    }
  }

  std::vector<Index> negatives(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    negatives[i] = inertia_from_eigenvalues(spectra[i], eps).n_neg;
  }
  for (std::size_t i = 0; i < last; ++i) {
    const long c = static_cast<long>(negatives[i]) - static_cast<long>(negatives[i + 1]);
    if (c != 0) result.ledger.push_back({result.samples[i], result.samples[i + 1], c});
    result.value += c;
  }
  if (options.trace) result.spectra = std::move(spectra);
  return result;
}

namespace {

// Path A + chi-(t) B + chi+(t) C with fixed matrices.
OperatorPath affine_path(Matrix a, Matrix b, Matrix c, const ChiPair& chi,
                         const std::vector<double>& grid) {
  validate_chi(chi);
  auto plus = chi.plus;
  auto minus = chi.minus;
  return OperatorPath(grid, [a = std::move(a), b = std::move(b), c = std::move(c), plus,
                             minus](double t) {
    return HermitianOperator(a + minus(t) * b + plus(t) * c);
  });
}

}  // namespace

OperatorPath suspension_even(const ModelInstance& model, double kappa, const ChiPair& chi,
                             const std::vector<double>& grid, std::optional<double> rho) {
  if (model.parity != Parity::Even || !model.graded_dirac) {
    fail(ErrorCode::InvalidArgument, "suspension_even needs an even model");
  }
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  const GradedOperator& d = *model.graded_dirac;
  Matrix a = kappa * d.matrix();
  Matrix gamma = d.grading_operator().matrix();
  Matrix gh = build_even_localiser(model.k_rep, d, kappa).matrix() - a;
  Matrix b = -gamma;
  if (rho) {
    const SpectralWindow window = spectral_window(d.op(), *rho);
    a = compress_to_window(a, window, 1);
    b = compress_to_window(b, window, 1);
    gh = compress_to_window(gh, window, 1);
  }
  return affine_path(std::move(a), std::move(b), std::move(gh), chi, grid);
}

OperatorPath suspension_odd(const ModelInstance& model, double kappa, const ChiPair& chi,
                            const std::vector<double>& grid, std::optional<double> rho) {
  if (model.parity != Parity::Odd) fail(ErrorCode::InvalidArgument, "suspension_odd needs an odd model");
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be > 0");
  const Index n = model.dim();
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = kappa * model.dirac().matrix();
  a.bottomRightCorner(n, n) = -kappa * model.dirac().matrix();
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topRightCorner(n, n).setIdentity();
  b.bottomLeftCorner(n, n).setIdentity();
  Matrix c = Matrix::Zero(2 * n, 2 * n);
  c.topRightCorner(n, n) = model.k_rep;
  c.bottomLeftCorner(n, n) = model.k_rep.adjoint();
  if (rho) {
    const SpectralWindow window = spectral_window(model.dirac(), *rho);
    a = compress_to_window(a, window, 2);
    b = compress_to_window(b, window, 2);
    c = compress_to_window(c, window, 2);
  }
  return affine_path(std::move(a), std::move(b), std::move(c), chi, grid);
}

OperatorPath suspension(const ModelInstance& model, double kappa, const ChiPair& chi,
                        const std::vector<double>& grid, std::optional<double> rho) {
  return model.parity == Parity::Even ? suspension_even(model, kappa, chi, grid, rho)
                                      : suspension_odd(model, kappa, chi, grid, rho);
}

ConjugationResult sf_conjugation(const HermitianOperator& d, const Matrix& u,
                                 std::optional<double> window, int points) {
  const Index n = d.dim();
  if (u.rows() != n || u.cols() != n) fail(ErrorCode::DimensionMismatch, "sf_conjugation: u size");
  if (linalg::max_abs(u * u.adjoint() - Matrix::Identity(n, n)) > 1e-10) {
    fail(ErrorCode::NonUnitary, "sf_conjugation: u is not unitary to 1e-10");
  }
  Matrix start = d.matrix();
  Matrix finish = u * d.matrix() * u.adjoint();
  if (window) {
    if (!linalg::is_diagonal(d.matrix())) {
      fail(ErrorCode::InvalidArgument, "sf_conjugation: a window needs a diagonal D");
    }
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i) {
      if (std::abs(d.matrix()(i, i).real()) <= *window) idx.push_back(i);
    }
    if (idx.empty()) fail(ErrorCode::InvalidArgument, "sf_conjugation: empty window");
    start = compress(start, idx);
    finish = compress(finish, idx);
  }
  const HermitianOperator t0(std::move(start));
  const HermitianOperator t1(std::move(finish));
  if (spectral_gap(t0) <= 1e-12 * std::max(1.0, operator_norm(t0))) {
    fail(ErrorCode::SingularMatrix, "sf_conjugation: D is not invertible");
  }
  ConjugationResult out;
  out.window_dim = t0.dim();
  out.crossings = sf_crossings(straight_line(t0, t1, points)).value;
  out.endpoints = sf_endpoints(t0, t1);
  return out;
}

namespace {

Matrix range_basis(const Projection& p) {
  const auto eig = linalg::eigen_hermitian(p.matrix());
  std::vector<Index> cols;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 0.5) cols.push_back(i);
  }
  std::vector<Index> rows(static_cast<std::size_t>(p.dim()));
  for (Index i = 0; i < p.dim(); ++i) rows[static_cast<std::size_t>(i)] = i;
  return compress(eig.vectors, rows, cols);
}

}  // namespace

long relative_index_projections(const Projection& p, const Projection& q) {
  if (p.dim() != q.dim()) fail(ErrorCode::DimensionMismatch, "relative_index_projections: dims");
  const long by_rank = static_cast<long>(p.rank()) - static_cast<long>(q.rank());
  const Matrix vp = range_basis(p);
  const Matrix vq = range_basis(q);
  Index r = 0;
  if (vp.cols() > 0 && vq.cols() > 0) {
    const RealVector s = linalg::singular_values(vq.adjoint() * vp);
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) >= 1e-10 && s(i) <= 1e-6) {
        fail(ErrorCode::RankAmbiguity, "overlap singular value " + std::to_string(s(i)) +
                                           " is ambiguous at the rank tolerance");
      }
      if (s(i) > 1e-6) ++r;
    }
  }
  const long kernel = static_cast<long>(vp.cols() - r);
  const long cokernel = static_cast<long>(vq.cols() - r);
  if (kernel - cokernel != by_rank) {
    fail(ErrorCode::RankAmbiguity, "rank difference and kernel count disagree");
  }
  return by_rank;
}

Matrix odd_projection_unitary(const Projection& p, const std::vector<int>& grading) {
  if (static_cast<Index>(grading.size()) != p.dim()) {
    fail(ErrorCode::DimensionMismatch, "odd_projection_unitary: grading length");
  }
  std::vector<Index> plus, minus;
  for (std::size_t i = 0; i < grading.size(); ++i) {
    if (grading[i] == 1) {
      plus.push_back(static_cast<Index>(i));
    } else if (grading[i] == -1) {
      minus.push_back(static_cast<Index>(i));
    } else {
      fail(ErrorCode::InvalidArgument, "grading entries must be +1 or -1");
    }
  }
  if (plus.size() != minus.size()) {
    fail(ErrorCode::NotOddProjection, "grading sectors differ in dimension");
  }
  const Matrix s = 2.0 * p.matrix() - Matrix::Identity(p.dim(), p.dim());
  double even_part = 0.0;
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i < s.rows(); ++i) {
      if (grading[static_cast<std::size_t>(i)] == grading[static_cast<std::size_t>(j)]) {
        even_part = std::max(even_part, std::abs(s(i, j)));
      }
    }
  }
  if (even_part > 1e-9) {
    fail(ErrorCode::NotOddProjection, "2P - 1 has an even part of size " + std::to_string(even_part));
  }
  Matrix u = 2.0 * compress(p.matrix(), minus, plus);
  const double defect =
      operator_norm(Matrix(u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())));
  if (defect > 1e-10) {
    fail(ErrorCode::NotOddProjection, "U_P is not unitary: defect " + std::to_string(defect));
  }
  return u;
}

void write_trace_csv(const std::string& path, const SfResult& result) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FormatError, "cannot write " + path);
  out << std::setprecision(17);
  out << "t";
  const Index n = result.spectra.empty() ? 0 : result.spectra.front().size();
  for (Index i = 0; i < n; ++i) out << ",lambda_" << i;
  out << '\n';
  for (std::size_t k = 0; k < result.spectra.size(); ++k) {
    out << result.samples[k];
    for (Index i = 0; i < result.spectra[k].size(); ++i) out << ',' << result.spectra[k](i);
    out << '\n';
  }
}

}  // namespace speclocal
