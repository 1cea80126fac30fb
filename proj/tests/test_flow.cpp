#include <random>

#include <catch_amalgamated.hpp>

#include "speclocal/error.hpp"
#include "speclocal/flow.hpp"
#include "speclocal/localiser.hpp"
#include "speclocal/oracles.hpp"
#include "test_util.hpp"

using namespace speclocal;

namespace {

HermitianOperator scalar(double v) { return HermitianOperator::diagonal(RealVector::Constant(1, v)); }

Matrix block_odd(const Matrix& g) {
  const Index n = g.rows();
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = g;
  m.bottomLeftCorner(n, n) = g.adjoint();
  return m;
}

}  // namespace

TEST_CASE("endpoint formula on scalars", "[flow]") {
  CHECK(sf_endpoints(scalar(-1.0), scalar(1.0)) == 1);
  CHECK(sf_endpoints(scalar(1.0), scalar(1.0)) == 0);
  CHECK(sf_endpoints(scalar(1.0), scalar(-2.0)) == -1);
}

TEST_CASE("crossing count on diagonal paths", "[flow]") {
  const OperatorPath one(uniform_grid(-1.0, 1.0, 11), [](double t) { return scalar(t + 0.05); });
  CHECK(sf_crossings(one).value == 1);

  const OperatorPath cancel(uniform_grid(-1.0, 1.0, 11), [](double t) {
    RealVector d(2);
    d << t + 0.05, -t - 0.05;
    return HermitianOperator::diagonal(d);
  });
  CHECK(sf_crossings(cancel).value == 0);
}

TEST_CASE("grid samples on a crossing are moved", "[flow]") {
  const OperatorPath exact(uniform_grid(-1.0, 1.0, 11), [](double t) { return scalar(t); });
  const SfResult r = sf_crossings(exact);
  CHECK(r.value == 1);
  CHECK(r.replaced_samples == 1);

  const OperatorPath singular_end(uniform_grid(0.0, 1.0, 5), [](double t) { return scalar(t); });
  CHECK_THROWS_AS(sf_crossings(singular_end), Error);
}

TEST_CASE("paths with touching eigenvalues hit the refinement limit", "[flow]") {
  const OperatorPath touch(uniform_grid(-1.0, 1.0, 5), [](double t) {
    RealVector d(2);
    d << 1.0, std::abs(t) < 0.9 ? 1e-9 : 1.0;
    return HermitianOperator::diagonal(d);
  });
  SfOptions o;
  o.epsilon = 1e-3;
  o.max_depth = 3;
  try {
    sf_crossings(touch, o);
    FAIL("expected RefinementLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RefinementLimit);
  }
}

TEST_CASE("crossings equal endpoints on random straight lines", "[flow][property]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 17;
    const HermitianOperator a(test::random_hermitian(rng, n));
    const HermitianOperator b(test::random_hermitian(rng, n));
    if (spectral_gap(a) < 1e-3 || spectral_gap(b) < 1e-3) continue;
    SfOptions serial;
    serial.execution = Execution::Serial;
    const SfResult s = sf_crossings(straight_line(a, b), serial);
    const SfResult p = sf_crossings(straight_line(a, b));
    CHECK(s.value == sf_endpoints(a, b));
    CHECK(s.value == p.value);
    CHECK(s.samples == p.samples);
  }
}

TEST_CASE("chi pairs", "[flow]") {
  for (const ChiPair& chi : {ChiPair::clamp(), ChiPair::smooth()}) {
    CHECK_NOTHROW(validate_chi(chi));
    CHECK(chi.plus(0.0) == 0.0);
    CHECK(chi.minus(0.0) == 0.0);
    CHECK(chi.plus(1.0) == 1.0);
    CHECK(chi.minus(-1.0) == 1.0);
    CHECK(chi.plus(-0.5) == 0.0);
  }
  ChiPair bad = ChiPair::clamp();
  bad.plus = [](double t) { return t; };
  CHECK_THROWS_AS(validate_chi(bad), Error);
}

TEST_CASE("even suspension endpoints", "[flow][shift]") {
  const ModelInstance m = build_weighted_shift_dirac(20, 1, 1);
  const double kappa = 0.1;
  const OperatorPath path = suspension_even(m, kappa, ChiPair::clamp(), uniform_grid(-1, 1, 9));
  const Matrix& d = m.dirac().matrix();
  const Matrix gamma = m.graded_dirac->grading_operator().matrix();
  CHECK((path.evaluate(-1.0).matrix() - (kappa * d - gamma)).norm() < 1e-14);
  CHECK((path.evaluate(0.0).matrix() - kappa * d).norm() < 1e-14);
  CHECK((path.evaluate(1.0).matrix() - build_localiser(m, kappa).matrix()).norm() < 1e-14);
}

TEST_CASE("odd suspension endpoints", "[flow][circle]") {
  const ModelInstance m = build_circle_model(20, {{1, Complex(1.0)}, {0, Complex(0.5)}});
  const double kappa = 0.05;
  const OperatorPath path = suspension_odd(m, kappa, ChiPair::clamp(), uniform_grid(-1, 1, 9));
  const Index n = m.dim();
  const HermitianOperator left = build_odd_localiser(Matrix::Identity(n, n), m.dirac(), kappa);
  CHECK((path.evaluate(-1.0).matrix() - left.matrix()).norm() < 1e-14);
  CHECK((path.evaluate(1.0).matrix() - build_localiser(m, kappa).matrix()).norm() < 1e-14);
}

TEST_CASE("suspension flow equals the pairing", "[flow]") {
  const std::vector<std::pair<ModelInstance, LocaliserParams>> cases{
      {build_weighted_shift_dirac(40, 2, 1), {0.1, 10.5, Mode::Permissive}},
      {build_weighted_shift_dirac(40, 2, -1), {0.1, 10.5, Mode::Permissive}},
      {build_circle_model(60, {{2, Complex(1.0)}}), {0.05, 30.5, Mode::Permissive}},
      {build_circle_model(60, {{-1, Complex(1.0)}}), {0.05, 30.5, Mode::Permissive}},
  };
  for (const auto& [model, p] : cases) {
    const long want = pairing(model, p, {false, false}).value;
    for (const ChiPair& chi : {ChiPair::clamp(), ChiPair::smooth()}) {
      const OperatorPath path = suspension(model, p.kappa, chi, uniform_grid(-1, 1, 33), p.rho);
      CHECK(sf_crossings(path).value == want);
      CHECK(sf_endpoints(path.evaluate(-1.0), path.evaluate(1.0)) == want);
    }
  }
}

TEST_CASE("conjugation flow", "[flow][circle]") {
  const ModelInstance m1 = build_circle_model(60, {{1, Complex(1.0)}});
  const ModelInstance m2 = build_circle_model(60, {{2, Complex(1.0)}});
  const RealVector shifted = m1.dirac().matrix().diagonal().real().array() + 0.5;
  const HermitianOperator d = HermitianOperator::diagonal(shifted);

  const ConjugationResult id = sf_conjugation(d, Matrix::Identity(m1.dim(), m1.dim()), 20.0);
  CHECK(id.crossings == 0);

  const ConjugationResult one = sf_conjugation(d, m1.k_rep, 20.0);
  const ConjugationResult two = sf_conjugation(d, m2.k_rep, 20.0);
  CHECK(std::abs(one.crossings) == 1);
  CHECK(one.crossings == one.endpoints);
  CHECK(two.crossings == 2 * one.crossings);
  const ToeplitzResult toe = toeplitz_index(m1.k_rep, d, 20.0);
  CHECK(one.crossings == toe.index);
}

TEST_CASE("relative index of projections", "[flow]") {
  RealVector p(3), q(3);
  p << 1, 1, 0;
  q << 1, 0, 0;
  const Projection pp(HermitianOperator::diagonal(p));
  const Projection qq(HermitianOperator::diagonal(q));
  CHECK(relative_index_projections(pp, qq) == 1);
  CHECK(relative_index_projections(qq, pp) == -1);
  CHECK(relative_index_projections(pp, pp) == 0);
}

TEST_CASE("suspension of a weighted shift relates to rank p", "[flow][shift]") {
  // S_H(1) = H = 2p - 1 and S_H(-1) = -1 on a small space.
  for (int rank = 0; rank <= 4; ++rank) {
    RealVector h(4);
    for (int i = 0; i < 4; ++i) h(i) = i < rank ? 1.0 : -1.0;
    const Projection top = positive_spectral_projection(HermitianOperator::diagonal(h));
    const Projection bottom = positive_spectral_projection(HermitianOperator::diagonal(RealVector::Constant(4, -1.0)));
    CHECK(relative_index_projections(top, bottom) == rank);
  }
}

TEST_CASE("odd projection unitary", "[flow]") {
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const Projection p(HermitianOperator{half});
  const Matrix u = odd_projection_unitary(p, {1, -1});
  CHECK(std::abs(u(0, 0) - Complex(1.0)) < 1e-14);

  Matrix g(1, 1);
  g << Complex(0.0, 2.0);
  const Projection pg = positive_spectral_projection(HermitianOperator(block_odd(g)));
  const Matrix ug = odd_projection_unitary(pg, {1, -1});
  CHECK(std::abs(ug(0, 0) - Complex(0.0, -1.0)) < 1e-12);

  RealVector d(2);
  d << 1.0, 0.0;
  const Projection even(HermitianOperator::diagonal(d));
  CHECK_THROWS_AS(odd_projection_unitary(even, {1, -1}), Error);
}

TEST_CASE("random odd projections give unitaries", "[flow][property]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 6;
    const Matrix w = test::random_unitary(rng, n);
    Matrix p(2 * n, 2 * n);
    p << Matrix::Identity(n, n), w.adjoint(), w, Matrix::Identity(n, n);
    p *= 0.5;
    std::vector<int> grading(2 * n, 1);
    std::fill(grading.begin() + n, grading.end(), -1);
    const Matrix u = odd_projection_unitary(Projection(HermitianOperator(p, 1e-12)), grading);
    CHECK((u.adjoint() * u - Matrix::Identity(n, n)).norm() < 1e-10);
    CHECK((u - w).norm() < 1e-10);
  }
}
