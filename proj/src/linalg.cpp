#include "speclocal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "speclocal/error.hpp"

namespace speclocal::linalg {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": matrix is not square");
  }
}

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    fail(ErrorCode::LapackFailure, std::string(routine) + " returned info=" + std::to_string(info));
  }
}

}  // namespace

RealVector eigenvalues_hermitian(const Matrix& m) {
  check_square(m, "eigenvalues_hermitian");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  RealVector w(n);
  if (n == 0) return w;
  Matrix a = m;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()), "zheevd");
  return w;
}

EigenDecomposition eigen_hermitian(const Matrix& m) {
  check_square(m, "eigen_hermitian");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  EigenDecomposition out{RealVector(n), m};
  if (n == 0) return out;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n, out.values.data()),
             "zheevd");
  return out;
}

RealVector singular_values(const Matrix& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  RealVector s(k);
  if (k == 0) return s;
  Matrix a = m;
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr, 1,
                            nullptr, 1),
             "zgesdd");
  return s;
}

FactorizationInertia factorization_inertia(const Matrix& m, double shift) {
  check_square(m, "factorization_inertia");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  FactorizationInertia out;
  if (n == 0) return out;
  Matrix a = m;
  a.diagonal().array() -= shift;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
  // info > 0 flags an exactly singular block of D; the counts below still hold.
  if (info < 0) check_info(info, "zhetrf");

  auto count = [&out](double v) {
    if (v > 0.0) {
      ++out.positive;
    } else if (v < 0.0) {
      ++out.negative;
    } else {
      ++out.zero;
    }
  };
  for (lapack_int k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      count(a(k, k).real());
      k += 1;
    } else {
      // 2x2 pivot block [[a, conj(b)], [b, c]] stored in the lower triangle.
      const double p = a(k, k).real();
      const double q = a(k + 1, k + 1).real();
      const double b = std::abs(a(k + 1, k));
      const double mid = 0.5 * (p + q);
      const double rad = std::hypot(0.5 * (p - q), b);
      count(mid + rad);
      count(mid - rad);
      k += 2;
    }
  }
  return out;
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool is_diagonal(const Matrix& m, double tol) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && std::abs(m(i, j)) > tol) return false;
    }
  }
  return true;
}

}  // namespace speclocal::linalg
