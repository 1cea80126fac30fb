#include "speclocal/kernels.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "speclocal/error.hpp"

namespace speclocal::kernels {

int default_workers() { return omp_get_max_threads(); }

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn,
                    Execution execution, int workers) {
  if (execution == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int threads = workers > 0 ? workers : default_workers();
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<RealVector> sample_spectra(const std::function<HermitianOperator(double)>& f,
                                       const std::vector<double>& grid, Execution execution,
                                       int workers) {
  std::vector<RealVector> out(grid.size());
  for_each_index(
      grid.size(),
      [&](std::size_t i) { out[i] = linalg::eigenvalues_hermitian(f(grid[i]).matrix()); },
      execution, workers);
  return out;
}

std::vector<Matrix> occupied_frames(const std::function<Matrix(double, double)>& h, int n,
                                    double gap_tol, Execution execution, int workers) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "occupied_frames: grid must be positive");
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<Matrix> frames(total);
  std::vector<Index> occupied(total, 0);
  for_each_index(
      total,
      [&](std::size_t idx) {
        const int i = static_cast<int>(idx / static_cast<std::size_t>(n));
        const int j = static_cast<int>(idx % static_cast<std::size_t>(n));
        const double kx = 2.0 * M_PI * i / n;
        const double ky = 2.0 * M_PI * j / n;
        const auto eig = linalg::eigen_hermitian(h(kx, ky));
        Index occ = 0;
        for (Index a = 0; a < eig.values.size(); ++a) {
          if (std::abs(eig.values(a)) <= gap_tol) {
            fail(ErrorCode::GapClosure, "Bloch Hamiltonian has eigenvalue " +
                                            std::to_string(eig.values(a)) + " at k = (" +
                                            std::to_string(kx) + ", " + std::to_string(ky) + ")");
          }
          if (eig.values(a) < 0.0) ++occ;
        }
        occupied[idx] = occ;
        frames[idx] = eig.vectors.leftCols(occ);
      },
      execution, workers);
  for (std::size_t idx = 1; idx < total; ++idx) {
    if (occupied[idx] != occupied[0]) {
      fail(ErrorCode::GapClosure, "number of occupied bands varies over the Brillouin zone");
    }
  }
  return frames;
}

namespace {

Complex link(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return Complex(1.0);
  const Complex d = (a.adjoint() * b).determinant();
  const double r = std::abs(d);
  if (r < 1e-12) fail(ErrorCode::GapClosure, "vanishing link variable between neighbouring frames");
  return d / r;
}

}  // namespace

double plaquette_sum(const std::vector<Matrix>& frames, int n, Execution execution, int workers) {
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (frames.size() != total) fail(ErrorCode::DimensionMismatch, "plaquette_sum: frame count");
  auto at = [&](int i, int j) -> const Matrix& {
    return frames[static_cast<std::size_t>(((i % n) + n) % n) * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(((j % n) + n) % n)];
  };
  std::vector<double> field(total);
  for_each_index(
      total,
      [&](std::size_t idx) {
        const int i = static_cast<int>(idx / static_cast<std::size_t>(n));
        const int j = static_cast<int>(idx % static_cast<std::size_t>(n));
        const Matrix& a = at(i, j);
        const Matrix& b = at(i + 1, j);
        const Matrix& c = at(i + 1, j + 1);
        const Matrix& d = at(i, j + 1);
        field[idx] = std::arg(link(a, b) * link(b, c) * link(c, d) * link(d, a));
      },
      execution, workers);
  double sum = 0.0;
  for (double f : field) sum += f;
  return sum;
}

}  // namespace speclocal::kernels
