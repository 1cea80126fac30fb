#include "speclocal/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "speclocal/error.hpp"

namespace speclocal {

HermitianOperator::HermitianOperator(Matrix entries, std::optional<double> herm_tol) {
  if (entries.rows() != entries.cols()) {
    fail(ErrorCode::DimensionMismatch, "HermitianOperator: matrix is " +
                                           std::to_string(entries.rows()) + "x" +
                                           std::to_string(entries.cols()));
  }
  if (entries.rows() < 1) fail(ErrorCode::InvalidArgument, "HermitianOperator: dim must be >= 1");
  const double scale = linalg::max_abs(entries);
  herm_tol_ = herm_tol.value_or(1e-12 * scale);
  if (herm_tol_ < 0.0) fail(ErrorCode::InvalidArgument, "herm_tol must be nonnegative");
  const double asym = linalg::max_abs(entries - entries.adjoint());
  if (asym > herm_tol_) {
    std::ostringstream os;
    os << "max |M - M*| = " << asym << " exceeds herm_tol = " << herm_tol_;
    fail(ErrorCode::NotHermitian, os.str());
  }
  m_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator::HermitianOperator(Matrix entries, double herm_tol, Trusted)
    : m_(std::move(entries)), herm_tol_(herm_tol) {}

HermitianOperator HermitianOperator::identity(Index dim) {
  if (dim < 1) fail(ErrorCode::InvalidArgument, "identity: dim must be >= 1");
  return HermitianOperator(Matrix::Identity(dim, dim), 0.0, Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& values) {
  if (values.size() < 1) fail(ErrorCode::InvalidArgument, "diagonal: dim must be >= 1");
  return HermitianOperator(values.cast<Complex>().asDiagonal().toDenseMatrix(), 0.0, Trusted{});
}

HermitianOperator HermitianOperator::operator-() const {
  return HermitianOperator(-m_, herm_tol_, Trusted{});
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) fail(ErrorCode::DimensionMismatch, "HermitianOperator::operator+");
  return HermitianOperator(m_ + other.m_, herm_tol_ + other.herm_tol_, Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (other.dim() != dim()) fail(ErrorCode::DimensionMismatch, "HermitianOperator::operator-");
  return HermitianOperator(m_ - other.m_, herm_tol_ + other.herm_tol_, Trusted{});
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(factor * m_, std::abs(factor) * herm_tol_, Trusted{});
}

Index Inertia::signature(bool allow_kernel) const {
  if (n_zero != 0 && !allow_kernel) {
    fail(ErrorCode::SingularMatrix, "signature requested for a matrix with " +
                                        std::to_string(n_zero) + " near-zero eigenvalue(s)");
  }
  return n_pos - n_neg;
}

Projection::Projection(HermitianOperator matrix, double idem_tol)
    : p_(std::move(matrix)), idem_tol_(idem_tol) {
  const RealVector w = linalg::eigenvalues_hermitian(p_.matrix());
  for (Index i = 0; i < w.size(); ++i) {
    const double v = w(i);
    if (std::abs(v) <= idem_tol_) continue;
    if (std::abs(v - 1.0) <= idem_tol_) {
      ++rank_;
      continue;
    }
    std::ostringstream os;
    os << "eigenvalue " << v << " is not within idem_tol=" << idem_tol_ << " of {0,1}";
    fail(ErrorCode::NotProjection, os.str());
  }
}

double default_zero_tol(const HermitianOperator& m) { return 1e-8 * operator_norm(m); }

Inertia inertia_from_eigenvalues(const RealVector& w, double zero_tol) {
  Inertia out;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) > zero_tol) {
      ++out.n_pos;
    } else if (w(i) < -zero_tol) {
      ++out.n_neg;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

SpectrumInertia inertia_and_spectrum(const HermitianOperator& m, std::optional<double> zero_tol) {
  SpectrumInertia out;
  out.eigenvalues = linalg::eigenvalues_hermitian(m.matrix());
  const double norm = out.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = zero_tol.value_or(1e-8 * norm);
  if (tol < 0.0) fail(ErrorCode::InvalidArgument, "zero_tol must be nonnegative");
  out.zero_tol = tol;

  const Inertia by_eig = inertia_from_eigenvalues(out.eigenvalues, tol);

  Inertia by_factor;
  by_factor.n_pos = linalg::factorization_inertia(m.matrix(), tol).positive;
  by_factor.n_neg = linalg::factorization_inertia(m.matrix(), -tol).negative;
  by_factor.n_zero = m.dim() - by_factor.n_pos - by_factor.n_neg;

  if (!(by_eig == by_factor)) {
    std::ostringstream os;
    os << "eigendecomposition (" << by_eig.n_pos << "," << by_eig.n_neg << "," << by_eig.n_zero
       << ") vs factorization (" << by_factor.n_pos << "," << by_factor.n_neg << ","
       << by_factor.n_zero << ") at zero_tol=" << tol;
    fail(ErrorCode::BackendDisagreement, os.str());
  }
  out.inertia = by_eig;
  return out;
}

Inertia inertia(const HermitianOperator& m, std::optional<double> zero_tol) {
  return inertia_and_spectrum(m, zero_tol).inertia;
}

Index signature(const HermitianOperator& m, std::optional<double> zero_tol) {
  return inertia(m, zero_tol).signature();
}

Projection positive_spectral_projection(const HermitianOperator& m) {
  const auto eig = linalg::eigen_hermitian(m.matrix());
  const double norm = eig.values.cwiseAbs().maxCoeff();
  const double tol = 1e-8 * norm;
  Matrix p = Matrix::Zero(m.dim(), m.dim());
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (std::abs(v) <= tol) {
      fail(ErrorCode::SingularMatrix,
           "positive_spectral_projection: eigenvalue " + std::to_string(v) + " is near zero");
    }
    if (v > 0.0) p.noalias() += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  return Projection(HermitianOperator(std::move(p), 1e-10));
}

Projection interval_spectral_projection(const HermitianOperator& m, double rho, double eig_sep_tol) {
  if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "interval_spectral_projection: rho must be > 0");
  const auto eig = linalg::eigen_hermitian(m.matrix());
  Matrix p = Matrix::Zero(m.dim(), m.dim());
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (std::abs(std::abs(v) - rho) < eig_sep_tol) {
      std::ostringstream os;
      os << "eigenvalue " << v << " lies within " << eig_sep_tol << " of +-" << rho;
      fail(ErrorCode::BoundaryEigenvalue, os.str());
    }
    if (std::abs(v) <= rho) p.noalias() += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  return Projection(HermitianOperator(std::move(p), 1e-10));
}

double spectral_gap(const HermitianOperator& m) {
  return linalg::eigenvalues_hermitian(m.matrix()).cwiseAbs().minCoeff();
}

double spectral_gap(const Matrix& g) {
  if (g.rows() != g.cols()) fail(ErrorCode::DimensionMismatch, "spectral_gap: G must be square");
  const RealVector s = linalg::singular_values(g);
  return s(s.size() - 1);
}

double operator_norm(const HermitianOperator& m) {
  return linalg::eigenvalues_hermitian(m.matrix()).cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return linalg::singular_values(m)(0);
}

Matrix commutator(const Matrix& d, const Matrix& x) {
  if (d.rows() != d.cols() || x.rows() != x.cols() || d.rows() != x.rows()) {
    fail(ErrorCode::DimensionMismatch, "commutator: operands must be square of equal size");
  }
  const Index n = d.rows();
  Index nnz = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) nnz += (d(i, j) != Complex(0.0)) ? 1 : 0;
  }
  if (nnz <= 8 * n) {
    const Eigen::SparseMatrix<Complex> ds = d.sparseView();
    Matrix c = ds * x;
    c.noalias() -= x * ds;
    return c;
  }
  Matrix c = d * x;
  c.noalias() -= x * d;
  return c;
}

namespace {

// Norm of a commutator. For Hermitian D and X the commutator is
// anti-Hermitian, and i[D,X] goes through the Hermitian eigensolver.
double commutator_matrix_norm(const Matrix& c) {
  if (c.size() == 0) return 0.0;
  const double scale = linalg::max_abs(c);
  if (scale == 0.0) return 0.0;
  if (linalg::max_abs(c + c.adjoint()) <= 1e-12 * scale) {
    const Matrix ic = Complex(0.0, 1.0) * c;
    return linalg::eigenvalues_hermitian(0.5 * (ic + ic.adjoint())).cwiseAbs().maxCoeff();
  }
  return operator_norm(c);
}

}  // namespace

CommutatorNorm commutator_norm(const Matrix& d, const Matrix& x, const std::vector<bool>& interior) {
  const Matrix c = commutator(d, x);
  CommutatorNorm out;
  out.full = commutator_matrix_norm(c);
  if (interior.empty()) {
    out.interior = out.full;
    return out;
  }
  if (static_cast<Index>(interior.size()) != d.rows()) {
    fail(ErrorCode::DimensionMismatch, "commutator_norm: interior mask has wrong length");
  }
  std::vector<Index> idx;
  for (Index i = 0; i < d.rows(); ++i) {
    if (interior[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  out.interior = commutator_matrix_norm(compress(c, idx));
  return out;
}

CommutatorNorm commutator_norm_offdiagonal(const Matrix& b, const Matrix& x,
                                           const std::vector<bool>& interior) {
  if (b.rows() != x.rows() || b.cols() != x.cols() || b.rows() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "commutator_norm_offdiagonal: block shapes differ");
  }
  const Matrix c = commutator(b, x);
  CommutatorNorm out;
  out.full = operator_norm(c);
  if (interior.empty()) {
    out.interior = out.full;
    return out;
  }
  if (static_cast<Index>(interior.size()) != b.rows()) {
    fail(ErrorCode::DimensionMismatch, "commutator_norm_offdiagonal: interior mask has wrong length");
  }
  std::vector<Index> idx;
  for (Index i = 0; i < b.rows(); ++i) {
    if (interior[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  out.interior = operator_norm(compress(c, idx));
  return out;
}

Matrix polar_phase(const Matrix& g) {
  if (g.rows() != g.cols()) fail(ErrorCode::DimensionMismatch, "polar_phase: G must be square");
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= 1e-12 * std::max(1.0, s(0))) {
    fail(ErrorCode::SingularMatrix, "polar_phase: G is not invertible");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix compress(const Matrix& m, const std::vector<Index>& indices) {
  return compress(m, indices, indices);
}

Matrix compress(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace speclocal
