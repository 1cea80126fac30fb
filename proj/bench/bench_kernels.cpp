#include <random>

#include <benchmark/benchmark.h>

#include "speclocal/kernels.hpp"
#include "speclocal/oracles.hpp"

namespace {

using namespace speclocal;

Matrix random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return 0.5 * (a + a.adjoint());
}

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_SampleSpectra(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const Matrix a = random_hermitian(n, 1);
  const Matrix b = random_hermitian(n, 2);
  auto f = [&](double t) { return HermitianOperator(Matrix((1.0 - t) * a + t * b)); };
  std::vector<double> grid;
  for (int i = 0; i <= 32; ++i) grid.push_back(i / 32.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::sample_spectra(f, grid, execution_of(state)));
  }
}

void BM_FhsFieldSum(benchmark::State& state) {
  const int grid = static_cast<int>(state.range(1));
  const BlochHamiltonian bloch = qwz_bloch_function(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fhs_field_sum(bloch, grid, execution_of(state)));
  }
}

void BM_ForEachIndex(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(1));
  std::vector<Matrix> inputs;
  for (int i = 0; i < jobs; ++i) inputs.push_back(random_hermitian(64, 10 + i));
  std::vector<double> out(inputs.size());
  for (auto _ : state) {
    kernels::for_each_index(
        inputs.size(),
        [&](std::size_t i) { out[i] = linalg::eigenvalues_hermitian(inputs[i]).maxCoeff(); },
        execution_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

// first argument: 0 = serial reference, 1 = OpenMP
BENCHMARK(BM_SampleSpectra)->ArgsProduct({{0, 1}, {64, 160}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FhsFieldSum)->ArgsProduct({{0, 1}, {48, 96}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForEachIndex)->ArgsProduct({{0, 1}, {16, 64}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
