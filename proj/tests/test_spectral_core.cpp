#include <random>

#include <catch_amalgamated.hpp>

#include "speclocal/error.hpp"
#include "speclocal/spectral_core.hpp"
#include "test_util.hpp"

using namespace speclocal;
using Catch::Matchers::WithinAbs;

TEST_CASE("inertia of diagonal matrices", "[spectral]") {
  RealVector d(4);
  d << 1.0, 2.0, -3.0, 0.0;
  const Inertia in = inertia(HermitianOperator::diagonal(d));
  CHECK(in == Inertia{2, 1, 1});
  CHECK_THROWS_AS(in.signature(), Error);
  CHECK(in.signature(true) == 1);

  RealVector e(3);
  e << 1.0, -1.0, -1.0;
  CHECK(signature(HermitianOperator::diagonal(e)) == -1);
}

TEST_CASE("pauli matrices have zero signature", "[spectral]") {
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(signature(HermitianOperator(sx)) == 0);
  Matrix sy(2, 2);
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  CHECK(signature(HermitianOperator(sy)) == 0);
}

TEST_CASE("inertia matches a hand-built spectrum under conjugation", "[spectral]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial;
    RealVector lambda(n);
    Index pos = 0;
    for (int i = 0; i < n; ++i) {
      lambda(i) = (i % 3 == 0 ? -1.0 : 1.0) * (0.5 + i);
      pos += lambda(i) > 0 ? 1 : 0;
    }
    const Matrix q = test::random_unitary(rng, n);
    const HermitianOperator h(Matrix(q * lambda.cast<Complex>().asDiagonal() * q.adjoint()), 1e-10);
    const Inertia in = inertia(h);
    CHECK(in.n_pos == pos);
    CHECK(in.n_neg == n - pos);
    CHECK(in.n_zero == 0);
  }
}

TEST_CASE("hermiticity is enforced", "[spectral]") {
  Matrix m(2, 2);
  m << 1, 2, 3, 1;
  CHECK_THROWS_AS(HermitianOperator(m), Error);
  try {
    HermitianOperator bad(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("positive spectral projection", "[spectral]") {
  RealVector d(3);
  d << 2.0, -1.0, 0.5;
  const Projection p = positive_spectral_projection(HermitianOperator::diagonal(d));
  CHECK(p.rank() == 2);
  CHECK_THAT(std::abs(p.matrix()(0, 0)), WithinAbs(1.0, 1e-14));
  CHECK_THAT(std::abs(p.matrix()(1, 1)), WithinAbs(0.0, 1e-14));

  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const Projection q = positive_spectral_projection(HermitianOperator(sx));
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK((q.matrix() - half).norm() < 1e-14);
}

TEST_CASE("non-idempotent input is rejected as a projection", "[spectral]") {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(Projection(HermitianOperator(m)), Error);
}

TEST_CASE("interval projection rejects eigenvalues on the boundary", "[spectral]") {
  RealVector d(3);
  d << 1.0, 2.0, 3.0;
  const Projection p = interval_spectral_projection(HermitianOperator::diagonal(d), 2.5);
  CHECK(p.rank() == 2);
  try {
    interval_spectral_projection(HermitianOperator::diagonal(d), 2.0);
    FAIL("expected BoundaryEigenvalue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryEigenvalue);
  }
}

TEST_CASE("gap and norm", "[spectral]") {
  RealVector d(3);
  d << -0.3, 2.0, 0.7;
  const HermitianOperator h = HermitianOperator::diagonal(d);
  CHECK_THAT(spectral_gap(h), WithinAbs(0.3, 1e-14));
  CHECK_THAT(operator_norm(h), WithinAbs(2.0, 1e-14));

  Matrix g(2, 2);
  g << 3, 0, 0, Complex(0, 0.25);
  CHECK_THAT(spectral_gap(g), WithinAbs(0.25, 1e-14));
  CHECK_THAT(operator_norm(g), WithinAbs(3.0, 1e-14));
}

TEST_CASE("commutator norm against a direct computation", "[spectral]") {
  std::mt19937_64 rng(3);
  const int n = 9;
  RealVector dv(n);
  for (int i = 0; i < n; ++i) dv(i) = i - 4.0;
  const Matrix d = dv.cast<Complex>().asDiagonal();
  const Matrix x = test::random_hermitian(rng, n);
  const CommutatorNorm c = commutator_norm(d, x);
  const Matrix direct = d * x - x * d;
  const Eigen::JacobiSVD<Matrix> svd(direct);
  CHECK_THAT(c.full, WithinAbs(svd.singularValues()(0), 1e-10));
  CHECK((commutator(d, x) - direct).norm() < 1e-12);

  std::vector<bool> interior(n, false);
  for (int i = 2; i < 7; ++i) interior[i] = true;
  const CommutatorNorm ci = commutator_norm(d, x, interior);
  const Eigen::JacobiSVD<Matrix> svd_i(direct.block(2, 2, 5, 5));
  CHECK_THAT(ci.interior, WithinAbs(svd_i.singularValues()(0), 1e-10));
}

TEST_CASE("polar phase is unitary and recovers G", "[spectral]") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 6; ++n) {
    const Matrix g = test::random_complex(rng, n, n);
    const Matrix u = polar_phase(g);
    CHECK((u.adjoint() * u - Matrix::Identity(n, n)).norm() < 1e-12);
    const Matrix abs_g = u.adjoint() * g;
    CHECK((abs_g - abs_g.adjoint()).norm() < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(Matrix(0.5 * (abs_g + abs_g.adjoint())))
              .eigenvalues()
              .minCoeff() > 0.0);
  }
}

TEST_CASE("dual inertia backend agrees with Eigen's solver", "[spectral]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix h = test::random_hermitian(rng, 20 + trial);
    const SpectrumInertia s = inertia_and_spectrum(HermitianOperator(h));
    const RealVector ref = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues();
    CHECK((s.eigenvalues - ref).cwiseAbs().maxCoeff() < 1e-10);
    Index pos = 0;
    for (Index i = 0; i < ref.size(); ++i) pos += ref(i) > 0.0 ? 1 : 0;
    CHECK(s.inertia.n_pos == pos);
  }
}
