#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "speclocal/spectral_core.hpp"

namespace speclocal {

enum class Execution { Serial, Parallel };

namespace kernels {

/// Number of OpenMP threads available to parallel kernels.
int default_workers();

/// Calls fn(i) for every i < n. The parallel variant uses an OpenMP dynamic
/// schedule with `workers` threads (0 = default); the first exception by
/// index is rethrown after all iterations finish.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn,
                    Execution execution, int workers = 0);

/// Ascending eigenvalues of f(t) at each grid point.
std::vector<RealVector> sample_spectra(const std::function<HermitianOperator(double)>& f,
                                       const std::vector<double>& grid, Execution execution,
                                       int workers = 0);

/// Occupied (negative-energy) eigenvectors of h(kx, ky) on the n x n grid
/// k = 2 pi (i, j) / n, stored row-major in i. GapClosure when an eigenvalue
/// lies within `gap_tol` of zero or the occupied count varies.
std::vector<Matrix> occupied_frames(const std::function<Matrix(double, double)>& h, int n,
                                    double gap_tol, Execution execution, int workers = 0);

/// Sum over plaquettes of arg(U1 U2 U3 U4) with U the determinants of the
/// frame overlaps around each plaquette.
double plaquette_sum(const std::vector<Matrix>& frames, int n, Execution execution,
                     int workers = 0);

}  // namespace kernels
}  // namespace speclocal
