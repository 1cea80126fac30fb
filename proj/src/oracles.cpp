#include "speclocal/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "speclocal/error.hpp"
#include "speclocal/localiser.hpp"

namespace speclocal {

namespace {

long round_checked(double value, const std::string& what) {
  const double r = std::round(value);
  if (std::abs(value - r) >= kMaxResidue) {
    std::ostringstream os;
    os << what << " = " << value << " is not within " << kMaxResidue << " of an integer";
    fail(ErrorCode::ResidueTooLarge, os.str());
  }
  return static_cast<long>(r);
}

void check_ambiguous(double value, double tol, const std::string& what) {
  if (value >= tol / 10.0 && value <= 10.0 * tol) {
    std::ostringstream os;
    os << what << " " << value << " lies within a decade of the kernel tolerance " << tol;
    fail(ErrorCode::AmbiguousKernel, os.str());
  }
}

}  // namespace

KernelCount fredholm_index_graded(const GradedOperator& d, double rho_window,
                                  std::optional<double> tol) {
  const SpectralWindow window = spectral_window(d.op(), rho_window);
  KernelCount out;

  if (!window.basis) {
    const double norm = d.matrix().rowwise().norm().maxCoeff();
    out.tol = tol.value_or(1e-6 * norm);
    std::vector<Index> plus, minus;
    for (Index i : window.indices) {
      (d.grading()[static_cast<std::size_t>(i)] == 1 ? plus : minus).push_back(i);
    }
    Index rank = 0;
    if (!plus.empty() && !minus.empty()) {
      const RealVector s = linalg::singular_values(compress(d.matrix(), minus, plus));
      for (Index i = 0; i < s.size(); ++i) {
        check_ambiguous(s(i), out.tol, "singular value of D+");
        if (s(i) > out.tol) ++rank;
      }
    }
    out.ker_plus = static_cast<Index>(plus.size()) - rank;
    out.ker_minus = static_cast<Index>(minus.size()) - rank;
  } else {
    const auto eig = linalg::eigen_hermitian(d.matrix());
    out.tol = tol.value_or(1e-6 * eig.values.cwiseAbs().maxCoeff());
    std::vector<Index> kernel;
    for (Index i = 0; i < eig.values.size(); ++i) {
      const double a = std::abs(eig.values(i));
      if (a > rho_window) continue;
      check_ambiguous(a, out.tol, "eigenvalue of D");
      if (a <= out.tol) kernel.push_back(i);
    }
    if (!kernel.empty()) {
      std::vector<Index> rows(static_cast<std::size_t>(d.dim()));
      for (Index i = 0; i < d.dim(); ++i) rows[static_cast<std::size_t>(i)] = i;
      const Matrix k = compress(eig.vectors, rows, kernel);
      const Matrix gk = d.grading_operator().matrix() * k;
      const RealVector w = linalg::eigenvalues_hermitian(k.adjoint() * gk);
      for (Index i = 0; i < w.size(); ++i) (w(i) > 0.0 ? out.ker_plus : out.ker_minus)++;
    }
  }
  out.index = static_cast<long>(out.ker_plus) - static_cast<long>(out.ker_minus);
  return out;
}

long winding_number(const std::vector<Complex>& samples) {
  if (samples.size() < static_cast<std::size_t>(kMinWindingSamples)) {
    fail(ErrorCode::InvalidArgument, "winding_number needs at least " +
                                         std::to_string(kMinWindingSamples) + " samples");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Complex a = samples[j];
    const Complex b = samples[(j + 1) % samples.size()];
    if (std::abs(a) < 1e-12) fail(ErrorCode::SingularSymbol, "det g vanishes at a sample point");
    total += std::arg(b / a);
  }
  return round_checked(total / (2.0 * std::numbers::pi), "winding sum");
}

long winding_number(const std::vector<Matrix>& samples) {
  std::vector<Complex> dets;
  dets.reserve(samples.size());
  for (const auto& m : samples) {
    if (m.rows() != m.cols()) fail(ErrorCode::DimensionMismatch, "winding_number: non-square sample");
    dets.push_back(m.determinant());
  }
  return winding_number(dets);
}

long winding_number(const std::vector<SymbolTerm>& symbol, int samples) {
  std::vector<Complex> values(static_cast<std::size_t>(std::max(samples, 0)));
  for (int j = 0; j < samples; ++j) {
    values[static_cast<std::size_t>(j)] =
        evaluate_symbol(symbol, 2.0 * std::numbers::pi * j / samples);
  }
  return winding_number(values);
}

double fhs_field_sum(const BlochHamiltonian& bloch, int grid, Execution execution) {
  const auto frames = kernels::occupied_frames(bloch, grid, 1e-8, execution);
  return kernels::plaquette_sum(frames, grid, execution);
}

long chern_number_fhs(const BlochHamiltonian& bloch, int grid, Execution execution) {
  if (grid < kMinFhsGrid) {
    fail(ErrorCode::InvalidArgument, "FHS grid must be at least " + std::to_string(kMinFhsGrid));
  }
  return round_checked(fhs_field_sum(bloch, grid, execution) / (2.0 * std::numbers::pi),
                       "FHS field sum / 2 pi");
}

BlochHamiltonian qwz_bloch_function(double mass) {
  return [mass](double kx, double ky) -> Matrix { return qwz_bloch(mass, kx, ky); };
}

namespace {

struct WindowCount {
  Index kernel = 0;
  Index cokernel = 0;
  Index dim = 0;
};

// Number of kernel directions of t whose weight outside the top `band`
// window vectors exceeds 1/2.
Index interior_kernel(const Matrix& frame, Index band) {
  if (frame.cols() == 0) return 0;
  const Index interior_rows = frame.rows() - band;
  if (interior_rows <= 0) return 0;
  const RealVector s = linalg::singular_values(frame.topRows(interior_rows));
  Index count = 0;
  for (Index i = 0; i < s.size(); ++i) count += s(i) * s(i) > 0.5 ? 1 : 0;
  return count;
}

WindowCount toeplitz_count(const Matrix& u, const RealVector& diag, double window, Index band) {
  std::vector<Index> idx;
  for (Index i = 0; i < diag.size(); ++i) {
    if (diag(i) > 0.0 && diag(i) <= window) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return diag(a) < diag(b); });
  WindowCount out;
  out.dim = static_cast<Index>(idx.size());
  if (idx.empty()) return out;
  const Matrix t = compress(u, idx);
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  std::vector<Index> small;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) < 1e-6) small.push_back(i);
  }
  std::vector<Index> rows(idx.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
  out.kernel = interior_kernel(compress(svd.matrixV(), rows, small), band);
  out.cokernel = interior_kernel(compress(svd.matrixU(), rows, small), band);
  return out;
}

}  // namespace

ToeplitzResult toeplitz_index(const Matrix& u, const HermitianOperator& d, double window,
                              std::optional<int> band) {
  if (u.rows() != d.dim() || u.cols() != d.dim()) {
    fail(ErrorCode::DimensionMismatch, "toeplitz_index: u and D differ in size");
  }
  if (!linalg::is_diagonal(d.matrix())) {
    fail(ErrorCode::InvalidArgument, "toeplitz_index: D must be diagonal");
  }
  const Index n = u.rows();
  if (linalg::max_abs(u * u.adjoint() - Matrix::Identity(n, n)) > 1e-10) {
    fail(ErrorCode::NonUnitary, "toeplitz_index: u is not unitary");
  }
  const RealVector diag = d.matrix().diagonal().real();
  if (diag.cwiseAbs().minCoeff() <= 1e-12) {
    fail(ErrorCode::SingularMatrix, "toeplitz_index: D is not invertible");
  }
  const Index b = band.value_or(std::max(2, static_cast<int>(window / 4.0)));
  const WindowCount full = toeplitz_count(u, diag, window, b);
  const WindowCount reduced = toeplitz_count(u, diag, window - 2.0, b);
  const long index = static_cast<long>(full.kernel) - static_cast<long>(full.cokernel);
  const long reduced_index = static_cast<long>(reduced.kernel) - static_cast<long>(reduced.cokernel);
  if (index != reduced_index) {
    std::ostringstream os;
    os << "index " << index << " at W=" << window << " but " << reduced_index << " at W-2";
    fail(ErrorCode::WindowInstability, os.str());
  }
  return ToeplitzResult{index, full.kernel, full.cokernel, full.dim};
}

long raw_oracle(const ModelInstance& model) {
  switch (model.oracle_ref) {
    case OracleRef::StoredValue:
      if (!model.oracle_value) fail(ErrorCode::ValidationError, "model has no stored oracle value");
      return *model.oracle_value;
    case OracleRef::WindingNumber:
      if (model.params.symbol.empty()) {
        fail(ErrorCode::ValidationError, "winding_number oracle needs a symbol");
      }
      return winding_number(model.params.symbol);
    case OracleRef::ChernNumberFhs:
      return chern_number_fhs(qwz_bloch_function(model.params.mass));
    case OracleRef::FredholmIndexGraded: {
      if (!model.graded_dirac) fail(ErrorCode::ValidationError, "fredholm oracle needs a grading");
      const RealVector w = linalg::eigenvalues_hermitian(model.k_rep);
      if (w.minCoeff() > 0.0) {
        return fredholm_index_graded(*model.graded_dirac, model.containment_radius - 0.5).index;
      }
      if (w.maxCoeff() < 0.0) return 0;
      fail(ErrorCode::ValidationError,
           "fredholm oracle applies to definite K-theory representatives only");
    }
  }
  fail(ErrorCode::ValidationError, "unknown oracle reference");
}

}  // namespace speclocal
