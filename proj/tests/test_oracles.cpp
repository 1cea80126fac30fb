#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <catch_amalgamated.hpp>

#include "speclocal/error.hpp"
#include "speclocal/oracles.hpp"

using namespace speclocal;

namespace {

// Zeros of z^{-kmin} g(z) inside the unit disc minus the pole order at 0,
// from the companion matrix of the polynomial.
long winding_by_roots(const std::vector<SymbolTerm>& symbol) {
  int kmin = 0, kmax = 0;
  for (const auto& t : symbol) {
    kmin = std::min(kmin, t.k);
    kmax = std::max(kmax, t.k);
  }
  const int degree = kmax - kmin;
  Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(degree + 1);
  for (const auto& t : symbol) coeff(t.k - kmin) += t.c;
  int top = degree;
  while (top > 0 && std::abs(coeff(top)) == 0.0) --top;
  long inside = 0;
  if (top > 0) {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(top, top);
    for (int i = 1; i < top; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < top; ++i) companion(i, top - 1) = -coeff(i) / coeff(top);
    const Eigen::VectorXcd roots = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(companion).eigenvalues();
    for (Index i = 0; i < roots.size(); ++i) inside += std::abs(roots(i)) < 1.0 ? 1 : 0;
  }
  return inside + kmin;
}

// Chern number of the lower band of d(k).sigma: minus the solid angle swept
// by the unit vector over 4 pi, summed over a fine grid of triangles.
double chern_by_solid_angle(double mass, int n) {
  auto dvec = [mass](double kx, double ky) {
    const Eigen::Matrix2cd h = qwz_bloch(mass, kx, ky);
    Eigen::Vector3d d(h(0, 1).real(), -h(0, 1).imag(), h(0, 0).real());
    return Eigen::Vector3d(d.normalized());
  };
  auto solid = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    return 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
  };
  const double step = 2.0 * std::numbers::pi / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto a = dvec(i * step, j * step);
      const auto b = dvec((i + 1) * step, j * step);
      const auto c = dvec((i + 1) * step, (j + 1) * step);
      const auto d = dvec(i * step, (j + 1) * step);
      total += solid(a, b, c) + solid(a, c, d);
    }
  }
  return -total / (4.0 * std::numbers::pi);
}

std::vector<Complex> samples_of(const std::function<Complex(double)>& g, int n) {
  std::vector<Complex> out;
  for (int j = 0; j < n; ++j) out.push_back(g(2.0 * std::numbers::pi * j / n));
  return out;
}

}  // namespace

TEST_CASE("winding numbers of simple symbols", "[oracles]") {
  CHECK(winding_number(samples_of([](double t) { return std::polar(1.0, t); }, 512)) == 1);
  CHECK(winding_number(samples_of([](double t) { return std::polar(1.0, t) + 0.5; }, 512)) == 1);
  CHECK(winding_number(samples_of([](double) { return Complex(2.0, 1.0); }, 512)) == 0);
  CHECK_THROWS_AS(winding_number(samples_of([](double t) { return std::polar(1.0, t); }, 100)),
                  Error);
}

TEST_CASE("winding number agrees with root counting", "[oracles]") {
  const std::vector<std::vector<SymbolTerm>> symbols{
      {{1, 1.0}},
      {{-2, 1.0}},
      {{1, 1.0}, {0, 0.5}},
      {{3, 1.0}, {1, 0.3}, {-1, Complex(0.0, 0.2)}},
      {{0, 2.0}, {1, 0.7}, {-2, 0.4}},
      {{-1, 1.0}, {2, 0.4}, {0, 0.1}},
  };
  for (const auto& s : symbols) CHECK(winding_number(s) == winding_by_roots(s));
}

TEST_CASE("winding numbers add under products", "[oracles][property]") {
  auto f = [](double t) { return std::polar(1.0, 2 * t) + 0.3; };
  auto g = [](double t) { return std::polar(1.0, -t) * Complex(2.0, 0.0) + Complex(0.1, 0.4); };
  const int n = 1024;
  const long wf = winding_number(samples_of(f, n));
  const long wg = winding_number(samples_of(g, n));
  const long wfg = winding_number(samples_of([&](double t) { return f(t) * g(t); }, n));
  CHECK(wfg == wf + wg);
}

TEST_CASE("matrix-valued winding uses the determinant", "[oracles]") {
  std::vector<Matrix> samples;
  for (int j = 0; j < 512; ++j) {
    const double t = 2.0 * std::numbers::pi * j / 512;
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::polar(1.0, t);
    m(1, 1) = std::polar(1.0, 2.0 * t);
    samples.push_back(m);
  }
  CHECK(winding_number(samples) == 3);
}

TEST_CASE("FHS Chern numbers", "[oracles][qwz]") {
  const long c1 = chern_number_fhs(qwz_bloch_function(1.0));
  const long cm1 = chern_number_fhs(qwz_bloch_function(-1.0));
  CHECK(std::abs(c1) == 1);
  CHECK(cm1 == -c1);
  CHECK(chern_number_fhs(qwz_bloch_function(3.0)) == 0);
  CHECK(chern_number_fhs(qwz_bloch_function(5.0)) == 0);

  const BlochHamiltonian flat = [](double, double) {
    Matrix h(2, 2);
    h << 1, 0, 0, -1;
    return h;
  };
  CHECK(chern_number_fhs(flat) == 0);
  CHECK_THROWS_AS(chern_number_fhs(qwz_bloch_function(1.0), 12), Error);
}

TEST_CASE("FHS agrees with the solid-angle integral", "[oracles][qwz]") {
  for (double mass : {-3.0, -1.0, 0.5, 1.0, 1.5, 3.0}) {
    const double continuum = chern_by_solid_angle(mass, 200);
    CHECK(std::abs(continuum - std::round(continuum)) < 1e-6);
    CHECK(chern_number_fhs(qwz_bloch_function(mass)) == std::lround(continuum));
  }
}

TEST_CASE("graded Fredholm index", "[oracles]") {
  // D+ = [[1, 0]] from C^2 to C^1 has a one-dimensional kernel.
  Matrix d = Matrix::Zero(3, 3);
  d(2, 0) = 1.0;
  d(0, 2) = 1.0;
  const GradedOperator g(HermitianOperator(d), {1, 1, -1});
  const KernelCount k = fredholm_index_graded(g, 5.0);
  CHECK(k.ker_plus == 1);
  CHECK(k.ker_minus == 0);
  CHECK(k.index == 1);
}

TEST_CASE("Toeplitz index", "[oracles][circle]") {
  const ModelInstance m1 = build_circle_model(60, {{1, Complex(1.0)}});
  const ModelInstance mm1 = build_circle_model(60, {{-1, Complex(1.0)}});
  const RealVector shifted = m1.dirac().matrix().diagonal().real().array() + 0.5;
  const HermitianOperator d = HermitianOperator::diagonal(shifted);
  const ToeplitzResult t1 = toeplitz_index(m1.k_rep, d, 20.0);
  const ToeplitzResult tm1 = toeplitz_index(mm1.k_rep, d, 20.0);
  CHECK(std::abs(t1.index) == 1);
  CHECK(tm1.index == -t1.index);
  // shift up has a cokernel on the positive half-line
  CHECK(t1.index == -winding_number(m1.params.symbol));
  CHECK(toeplitz_index(Matrix::Identity(m1.dim(), m1.dim()), d, 20.0).index == 0);
}
