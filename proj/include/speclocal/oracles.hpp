#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "speclocal/kernels.hpp"
#include "speclocal/operators.hpp"

namespace speclocal {

struct KernelCount {
  Index ker_plus = 0;   // dim Ker D+
  Index ker_minus = 0;  // dim Ker D- = dim Coker D+
  long index = 0;
  double tol = 0.0;
};

/// dim Ker D+ - dim Ker D-, counted inside Ran P_[-rho,rho](D).
/// tol defaults to 1e-6 ||D||; AmbiguousKernel when a singular value of D+
/// lies in [tol/10, 10 tol].
KernelCount fredholm_index_graded(const GradedOperator& d, double rho_window,
                                  std::optional<double> tol = std::nullopt);

inline constexpr int kMinWindingSamples = 256;
inline constexpr double kMaxResidue = 0.01;

/// Winding number of theta -> det g(theta) from equispaced samples.
long winding_number(const std::vector<Complex>& samples);
long winding_number(const std::vector<Matrix>& samples);

/// Winding number of a circle symbol, sampled on `samples` points.
long winding_number(const std::vector<SymbolTerm>& symbol, int samples = 4096);

inline constexpr int kMinFhsGrid = 24;
inline constexpr int kDefaultFhsGrid = 48;

using BlochHamiltonian = std::function<Matrix(double kx, double ky)>;

/// Fukui-Hatano-Suzuki lattice Chern number of the negative-energy bands on
/// an n x n Brillouin-zone grid. GapClosure if some H(k) has an eigenvalue
/// within 1e-8 of zero or the number of occupied bands varies.
long chern_number_fhs(const BlochHamiltonian& bloch, int grid = kDefaultFhsGrid,
                      Execution execution = Execution::Parallel);

/// Sum of plaquette field strengths (radians) on the grid; the Chern number
/// is this divided by 2 pi.
double fhs_field_sum(const BlochHamiltonian& bloch, int grid, Execution execution);

BlochHamiltonian qwz_bloch_function(double mass);

struct ToeplitzResult {
  long index = 0;
  Index kernel = 0;
  Index cokernel = 0;
  Index window_dim = 0;
};

/// Index of P u P on Ran P_(0,W](D) for diagonal invertible D, counting only
/// kernel vectors whose weight on the top `band` basis vectors of the window
/// is below 1/2. WindowInstability unless the count at W - 2 agrees.
ToeplitzResult toeplitz_index(const Matrix& u, const HermitianOperator& d, double window,
                              std::optional<int> band = std::nullopt);

/// Raw oracle output for a model: winding number (circle), FHS Chern number
/// (QWZ), Index(D+) when H = +1 and 0 when H = -1 (weighted shift), or the
/// stored value.
long raw_oracle(const ModelInstance& model);

}  // namespace speclocal
