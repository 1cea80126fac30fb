#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speclocal/kernels.hpp"
#include "speclocal/operators.hpp"

namespace speclocal {

/// A family t -> T(t) of Hermitian matrices of constant dimension sampled on
/// a strictly increasing grid.
struct OperatorPath {
  std::vector<double> grid;
  std::function<HermitianOperator(double)> evaluate;
  Index dim = 0;

  OperatorPath(std::vector<double> grid, std::function<HermitianOperator(double)> evaluate);

  double start() const { return grid.front(); }
  double end() const { return grid.back(); }
};

/// Uniform grid of `points` values on [a, b].
std::vector<double> uniform_grid(double a, double b, int points);
inline constexpr int kDefaultGridPoints = 33;

/// Straight line (1 - s) T0 + s T1 for s in [0, 1].
OperatorPath straight_line(const HermitianOperator& t0, const HermitianOperator& t1,
                           int points = kDefaultGridPoints);

struct ChiPair {
  std::string name;
  std::function<double(double)> plus;
  std::function<double(double)> minus;

  /// chi+(t) = clamp(t, 0, 1), chi-(t) = clamp(-t, 0, 1).
  static ChiPair clamp();
  /// chi+(t) = s(clamp(t, 0, 1)) with s(x) = x^2 (3 - 2x), mirrored for chi-.
  static ChiPair smooth();
};

/// Checks support, normalisation and range of a chi pair on a sample grid.
void validate_chi(const ChiPair& chi);

/// 1/2 (Sig(T1) - Sig(T0)).
long sf_endpoints(const HermitianOperator& t0, const HermitianOperator& t1);

struct CrossingInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  long crossings = 0;  // n_neg(t0) - n_neg(t1)
};

struct SfResult {
  long value = 0;
  double epsilon = 0.0;
  std::vector<double> samples;  // grid actually used after sample replacement
  std::vector<CrossingInterval> ledger;  // intervals with nonzero crossings
  std::vector<RealVector> spectra;       // filled when trace is requested
  int replaced_samples = 0;
};

struct SfOptions {
  std::optional<double> epsilon;  // default 1e-6 times the endpoint norm
  int max_depth = 20;
  bool trace = false;
  Execution execution = Execution::Parallel;
  int workers = 0;
};

/// Signed count of eigenvalues crossing zero from per-step inertia
/// differences. A grid sample with an eigenvalue of modulus below epsilon is
/// moved towards a neighbour by successive halving (max_depth steps);
/// RefinementLimit names the offending interval when this fails.
SfResult sf_crossings(const OperatorPath& path, const SfOptions& options = {});

/// t -> kappa D + Gamma S_H(t), S_H(t) = -chi-(t) + chi+(t) H, on [-1, 1].
/// With `rho` the path is compressed to Ran P_[-rho,rho](D).
OperatorPath suspension_even(const ModelInstance& model, double kappa, const ChiPair& chi,
                             const std::vector<double>& grid, std::optional<double> rho = {});

/// t -> [[kappa D, S(t)], [S(t)*, -kappa D]], S(t) = chi-(t) + chi+(t) G.
OperatorPath suspension_odd(const ModelInstance& model, double kappa, const ChiPair& chi,
                            const std::vector<double>& grid, std::optional<double> rho = {});

OperatorPath suspension(const ModelInstance& model, double kappa, const ChiPair& chi,
                        const std::vector<double>& grid, std::optional<double> rho = {});

struct ConjugationResult {
  long crossings = 0;
  long endpoints = 0;
  Index window_dim = 0;
};

/// Spectral flow of the straight line D -> u D u*, both compressed to the
/// standard basis vectors with |D_ii| <= window (D diagonal) or to the full
/// space when `window` is empty.
ConjugationResult sf_conjugation(const HermitianOperator& d, const Matrix& u,
                                 std::optional<double> window = {},
                                 int points = kDefaultGridPoints);

/// rank(P) - rank(Q), cross-checked against dim ker - dim coker of
/// Q: Ran P -> Ran Q. RankAmbiguity when an overlap singular value lies in
/// [1e-10, 1e-6].
long relative_index_projections(const Projection& p, const Projection& q);

/// The unitary U_P with P = 1/2 [[1, U_P*], [U_P, 1]] in the grading's
/// (plus, minus) block order. NotOddProjection if 2P - 1 does not
/// anticommute with the grading or U_P is not unitary to 1e-10.
Matrix odd_projection_unitary(const Projection& p, const std::vector<int>& grading);

/// Writes "t,lambda_0,...,lambda_{n-1}" rows.
void write_trace_csv(const std::string& path, const SfResult& result);

}  // namespace speclocal
