#pragma once

#include <optional>
#include <vector>

#include "speclocal/linalg.hpp"

namespace speclocal {

/// Dense complex Hermitian matrix. Hermiticity is checked once on
/// construction against `herm_tol` (default 1e-12 times the largest entry)
/// and the stored entries are then symmetrized exactly.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries, std::optional<double> herm_tol = std::nullopt);

  static HermitianOperator identity(Index dim);
  static HermitianOperator diagonal(const RealVector& values);

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double herm_tol() const noexcept { return herm_tol_; }

  HermitianOperator operator-() const;
  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator scaled(double factor) const;

 private:
  struct Trusted {};
  HermitianOperator(Matrix entries, double herm_tol, Trusted);

  Matrix m_;
  double herm_tol_ = 0.0;
};

struct Inertia {
  Index n_pos = 0;
  Index n_neg = 0;
  Index n_zero = 0;

  Index dim() const noexcept { return n_pos + n_neg + n_zero; }
  /// n_pos - n_neg; raises SingularMatrix unless n_zero == 0 or `allow_kernel`.
  Index signature(bool allow_kernel = false) const;

  bool operator==(const Inertia&) const = default;
};

/// Orthogonal projection. Idempotency, self-adjointness and the {0,1}
/// spectrum are validated to `idem_tol` on construction.
class Projection {
 public:
  Projection(HermitianOperator matrix, double idem_tol = 1e-9);

  const HermitianOperator& op() const noexcept { return p_; }
  const Matrix& matrix() const noexcept { return p_.matrix(); }
  double idem_tol() const noexcept { return idem_tol_; }
  Index rank() const noexcept { return rank_; }
  Index dim() const noexcept { return p_.dim(); }

 private:
  HermitianOperator p_;
  double idem_tol_;
  Index rank_ = 0;
};

/// 1e-8 times the operator norm.
double default_zero_tol(const HermitianOperator& m);

/// Eigenvalue sign counts computed twice: from the Hermitian eigenvalues and
/// from Bunch-Kaufman factorizations of M -/+ zero_tol. The two must agree,
/// otherwise BackendDisagreement is raised.
Inertia inertia(const HermitianOperator& m, std::optional<double> zero_tol = std::nullopt);

/// Dual-backend inertia together with the ascending eigenvalues used for it.
struct SpectrumInertia {
  Inertia inertia;
  RealVector eigenvalues;
  double zero_tol = 0.0;
};
SpectrumInertia inertia_and_spectrum(const HermitianOperator& m,
                                     std::optional<double> zero_tol = std::nullopt);

/// Eigenvalue-only inertia (single backend); used where the caller already
/// cross-checks through another route.
Inertia inertia_from_eigenvalues(const RealVector& eigenvalues, double zero_tol);

Index signature(const HermitianOperator& m, std::optional<double> zero_tol = std::nullopt);

Projection positive_spectral_projection(const HermitianOperator& m);

inline constexpr double kEigSepTol = 1e-6;

Projection interval_spectral_projection(const HermitianOperator& m, double rho,
                                        double eig_sep_tol = kEigSepTol);

/// min |eigenvalue|; 0 for singular input.
double spectral_gap(const HermitianOperator& m);
/// Smallest singular value ||G^{-1}||^{-1} of a square matrix.
double spectral_gap(const Matrix& g);

double operator_norm(const HermitianOperator& m);
double operator_norm(const Matrix& m);

struct CommutatorNorm {
  double interior = 0.0;  // compression to the interior index set
  double full = 0.0;      // whole box, including seam and boundary rows
};

/// ||DX - XD||, both on the full matrix and compressed to the indices marked
/// in `interior` (all indices when empty).
CommutatorNorm commutator_norm(const Matrix& d, const Matrix& x,
                               const std::vector<bool>& interior = {});

/// Norm of [D, X (+) X] for an odd D = [[0, B*], [B, 0]] whose two grading
/// sectors carry the same copy of X: equals ||BX - XB||. `interior` masks
/// the indices of one sector.
CommutatorNorm commutator_norm_offdiagonal(const Matrix& b, const Matrix& x,
                                           const std::vector<bool>& interior = {});

/// Matrix of [D, X] = DX - XD, computed with a sparse D when D is sparse.
Matrix commutator(const Matrix& d, const Matrix& x);

/// Polar phase u = G |G|^{-1} of an invertible matrix.
Matrix polar_phase(const Matrix& g);

Matrix compress(const Matrix& m, const std::vector<Index>& indices);
Matrix compress(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols);

}  // namespace speclocal
