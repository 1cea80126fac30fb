#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace speclocal {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // columns are orthonormal eigenvectors
};

/// Eigenvalues of a Hermitian matrix (lower triangle is read), ascending.
RealVector eigenvalues_hermitian(const Matrix& m);
EigenDecomposition eigen_hermitian(const Matrix& m);

/// Singular values, descending.
RealVector singular_values(const Matrix& m);

/// Counts from a Bunch-Kaufman factorization of (m - shift*1).
/// By Sylvester's law of inertia these equal the eigenvalue sign counts of
/// the shifted matrix.
struct FactorizationInertia {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;
};
FactorizationInertia factorization_inertia(const Matrix& m, double shift);

/// Largest absolute entry.
double max_abs(const Matrix& m);

bool is_diagonal(const Matrix& m, double tol = 0.0);

}  // namespace linalg
}  // namespace speclocal
