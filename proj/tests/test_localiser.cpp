#include <cmath>

#include <catch_amalgamated.hpp>

#include "speclocal/error.hpp"
#include "speclocal/localiser.hpp"
#include "speclocal/oracles.hpp"

using namespace speclocal;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

const Certificate& find(const std::vector<Certificate>& certs, const std::string& name) {
  for (const auto& c : certs) {
    if (c.name == name) return c;
  }
  FAIL("missing certificate " << name);
  return certs.front();
}

const ModelInstance& shifted_circle() {
  static const ModelInstance m = build_circle_model(200, {{1, Complex(1.0)}, {0, Complex(0.5)}});
  return m;
}

}  // namespace

TEST_CASE("even localiser with scalar H", "[localiser]") {
  Matrix d(2, 2);
  d << 0, Complex(3.0, -1.0), Complex(3.0, 1.0), 0;
  const GradedOperator gd(HermitianOperator(d), {1, -1});
  const HermitianOperator l = build_even_localiser(Matrix::Identity(2, 2), gd, 0.5);
  Matrix want(2, 2);
  want << 1, 0.5 * Complex(3.0, -1.0), 0.5 * Complex(3.0, 1.0), -1;
  CHECK((l.matrix() - want).norm() < 1e-15);
}

TEST_CASE("even localiser requires an even representative", "[localiser]") {
  Matrix d(2, 2);
  d << 0, 1, 1, 0;
  const GradedOperator gd(HermitianOperator(d), {1, -1});
  CHECK_THROWS_AS(build_even_localiser(d, gd, 1.0), Error);
}

TEST_CASE("odd localiser spectra", "[localiser]") {
  RealVector n(5);
  n << -2, -1, 0, 1, 2;
  const double kappa = 0.3;
  const HermitianOperator l =
      build_odd_localiser(Matrix::Identity(5, 5), HermitianOperator::diagonal(n), kappa);
  const RealVector ev = linalg::eigenvalues_hermitian(l.matrix());
  std::vector<double> want;
  for (int i = 0; i < 5; ++i) {
    const double v = std::sqrt(kappa * kappa * n(i) * n(i) + 1.0);
    want.push_back(v);
    want.push_back(-v);
  }
  std::sort(want.begin(), want.end());
  for (Index i = 0; i < ev.size(); ++i) CHECK_THAT(ev(i), WithinAbs(want[i], 1e-12));

  Matrix g(1, 1);
  g << 2.0;
  const RealVector e2 =
      linalg::eigenvalues_hermitian(build_odd_localiser(g, HermitianOperator::diagonal(RealVector::Zero(1)), 1.0).matrix());
  CHECK_THAT(e2(0), WithinAbs(-2.0, 1e-14));
  CHECK_THAT(e2(1), WithinAbs(2.0, 1e-14));
}

TEST_CASE("QWZ localiser dimension", "[localiser][qwz]") {
  const ModelInstance m = build_qwz_model(12, 1.0, Offset::HalfInteger, BuildOptions{false});
  CHECK(build_localiser(m, 0.5).dim() == 4 * 25 * 25);
}

TEST_CASE("untruncated gap certificate", "[localiser][circle]") {
  const ModelInstance& m = shifted_circle();
  const Certificate c = validate_infinite_regime(m, 0.2, Mode::Strict);
  CHECK_THAT(c.bound, WithinRel(std::sqrt(m.k_rep_gap * m.k_rep_gap - 0.2 * 1.0), 1e-6));
  CHECK_THAT(c.bound, WithinAbs(0.2236, 1e-3));
  CHECK(c.holds);
  CHECK(c.measured >= c.bound);

  CHECK(code_of([&] { validate_infinite_regime(m, 0.3, Mode::Strict); }) ==
        ErrorCode::HypothesisViolated);
  const Certificate p = validate_infinite_regime(m, 0.3, Mode::Permissive);
  CHECK(std::isnan(p.measured));
  CHECK_FALSE(p.required);

  const ModelInstance shift = build_weighted_shift_dirac(20, 1);
  const Certificate s = validate_infinite_regime(shift, 50.0, Mode::Strict);
  CHECK(s.bound == 1.0);
  CHECK(s.holds);
}

TEST_CASE("strict parameter bounds", "[localiser][circle]") {
  const ModelInstance& m = shifted_circle();
  // g^3 / (12 ||G|| ||[D,G]||) with g = 1/2, ||G|| = 3/2, ||[D,G]|| = 1
  const double g = 0.5;
  const auto certs = validate_truncation_params(m, {1.0 / 144.0, 145.5, Mode::Strict});
  CHECK_THAT(find(certs, "kappa_bound").bound,
             WithinRel(m.k_rep_gap * m.k_rep_gap * m.k_rep_gap / (12.0 * 1.5), 1e-9));
  CHECK_THAT(g * g * g / (12.0 * 1.5 * 1.0), WithinRel(1.0 / 144.0, 1e-15));
  CHECK_THAT(find(certs, "rho_bound").bound, WithinRel(2.0 * m.k_rep_gap * 144.0, 1e-12));
  CHECK_THAT(2.0 * g * 144.0, WithinAbs(144.0, 1e-12));
  CHECK(find(certs, "kappa_bound").holds);
  CHECK(find(certs, "rho_bound").holds);
  CHECK_FALSE(find(certs, "coupling").required);

  CHECK(code_of([&] { validate_truncation_params(m, {1.0 / 144.0, 140.5, Mode::Strict}); }) ==
        ErrorCode::StrictModeViolation);
  CHECK(code_of([&] { validate_truncation_params(m, {0.01, 145.5, Mode::Strict}); }) ==
        ErrorCode::StrictModeViolation);
  CHECK_NOTHROW(validate_truncation_params(m, {0.01, 145.5, Mode::Permissive}));
}

TEST_CASE("QWZ advisory certificates", "[localiser][qwz]") {
  const ModelInstance m = build_qwz_model(12, 1.0, Offset::HalfInteger, BuildOptions{false});
  const auto certs = validate_truncation_params(m, {0.5, 8.5, Mode::Permissive});
  const Certificate& endpoint = find(certs, "endpoint");
  CHECK(endpoint.holds);
  CHECK_THAT(endpoint.bound, WithinAbs(4.25, 1e-12));
  CHECK_THAT(endpoint.measured, WithinAbs(m.k_rep_norm, 1e-12));
  // sqrt(g/2 * sqrt(47/48) * 4.25) is about 1.45, below ||H||
  const Certificate& coupling = find(certs, "coupling");
  CHECK_THAT(coupling.bound,
             WithinRel(std::sqrt(0.5 * m.k_rep_gap * std::sqrt(47.0 / 48.0) * 4.25), 1e-12));
  CHECK_FALSE(coupling.holds);
  CHECK_FALSE(coupling.required);
  CHECK(std::isnan(find(certs, "kappa_bound").bound));
}

TEST_CASE("circle truncation rank and window", "[localiser][circle]") {
  const ModelInstance& m = shifted_circle();
  const HermitianOperator l = build_localiser(m, 0.05);
  const TruncatedLocaliser t = truncate(m, l, {0.05, 30.5, Mode::Permissive});
  CHECK(t.rank == 2 * 61);
  CHECK(t.matrix.dim() == 2 * 61);
  CHECK(t.spectrum.inertia.n_zero == 0);

  const SpectralWindow w = spectral_window(m.dirac(), 30.5);
  CHECK(w.rank == 61);
  CHECK_FALSE(w.basis);
  CHECK(code_of([&] { spectral_window(m.dirac(), 30.0); }) == ErrorCode::BoundaryEigenvalue);
  CHECK(code_of([&] { truncate(m, l, {0.05, 1000.5, Mode::Permissive}); }) ==
        ErrorCode::ContainmentViolation);
}

TEST_CASE("eigenbasis window for non-diagonal D", "[localiser]") {
  Matrix d(3, 3);
  d << 0, 2, 0, 2, 0, 0, 0, 0, 5;
  HermitianOperator op(d);
  // D^2 is diagonal here, so rotate to force the eigenbasis route.
  Matrix q(3, 3);
  const double c = std::cos(0.3), s = std::sin(0.3);
  q << c, 0, s, 0, 1, 0, -s, 0, c;
  const HermitianOperator rotated(Matrix(q * d * q.adjoint()), 1e-12);
  const SpectralWindow w = spectral_window(rotated, 3.0);
  CHECK(w.rank == 2);
  REQUIRE(w.basis);
  CHECK(w.basis->cols() == 2);
  CHECK((w.basis->adjoint() * *w.basis - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("strict regime circle pairing", "[localiser][circle]") {
  const ModelInstance& m = shifted_circle();
  const PairingResult r = pairing_odd(m, {1.0 / 144.0, 145.5, Mode::Strict}, {true, true});
  CHECK(std::abs(r.value) == 1);
  CHECK(r.value == -raw_oracle(m));
  CHECK(r.truncated_gap >= 0.25);
  const Certificate& comp = find(r.certificates, "complement_gap");
  CHECK_THAT(comp.bound, WithinRel(std::sqrt(47.0 / 48.0) * 145.5 / 144.0, 1e-12));
  CHECK(comp.holds);
  CHECK(find(r.certificates, "full_box_gap").holds);
}

TEST_CASE("odd pairing of the identity is zero", "[localiser]") {
  const ModelInstance m = build_circle_model(40, {{0, Complex(1.0)}});
  CHECK(pairing_odd(m, {0.05, 20.5, Mode::Permissive}).value == 0);
}

TEST_CASE("phase determines the odd pairing", "[localiser][circle]") {
  const ModelInstance pure = build_circle_model(60, {{1, Complex(1.0)}});
  const ModelInstance shifted = build_circle_model(60, {{1, Complex(1.0)}, {0, Complex(0.5)}});
  const LocaliserParams p{0.05, 30.5, Mode::Permissive};
  CHECK(pairing_odd(pure, p).value == pairing_odd(shifted, p).value);
}

TEST_CASE("circle signature relates to the pairing", "[localiser][circle]") {
  const ModelInstance m = build_circle_model(60, {{1, Complex(1.0)}});
  const PairingResult r = pairing_odd(m, {0.05, 30.0 + 0.5, Mode::Permissive});
  CHECK(r.inertia.n_zero == 0);
  CHECK(r.signature == 2 * r.value);
}

TEST_CASE("weighted shift even pairing", "[localiser][shift]") {
  const LocaliserParams p{0.1, 10.5, Mode::Permissive};
  for (int nu : {1, 2, 3}) {
    const ModelInstance plus = build_weighted_shift_dirac(40, nu, 1);
    const PairingResult rp = pairing_even(plus, p, {true, true});
    CHECK(rp.value == -nu);
    CHECK(rp.signature == -nu);
    CHECK(rp.index_correction == -nu);
    const Certificate& comp = find(rp.certificates, "complement_gap");
    CHECK_THAT(comp.bound, WithinRel(std::sqrt(47.0 / 48.0) * 0.1 * 10.5, 1e-12));
    CHECK(comp.holds);

    const ModelInstance minus = build_weighted_shift_dirac(40, nu, -1);
    const PairingResult rm = pairing_even(minus, p);
    CHECK(rm.value == 0);
    CHECK(rm.signature == nu);
  }
}

TEST_CASE("QWZ even pairing matches FHS", "[localiser][qwz]") {
  const ModelInstance m = build_qwz_model(12, 1.0, Offset::HalfInteger, BuildOptions{false});
  const PairingResult r = pairing_even(m, {0.5, 8.5, Mode::Permissive}, {false, false});
  CHECK(r.value == chern_number_fhs(qwz_bloch_function(1.0)));
  CHECK(r.index_correction == 0);
}

TEST_CASE("strict QWZ with an infeasible radius", "[localiser][qwz]") {
  const ModelInstance m = build_qwz_model(8, 1.0);
  CHECK(code_of([&] { pairing_even(m, {0.5, 4.5, Mode::Strict}, {false, false}); }) ==
        ErrorCode::StrictModeViolation);
}
