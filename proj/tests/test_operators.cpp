#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "speclocal/error.hpp"
#include "speclocal/localiser.hpp"
#include "speclocal/matrix_market.hpp"
#include "speclocal/oracles.hpp"
#include "speclocal/operators.hpp"
#include "test_util.hpp"

using namespace speclocal;
using Catch::Matchers::ContainsSubstring;
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

// min over a fine theta grid of |g(theta)|
double symbol_minimum(const std::vector<SymbolTerm>& symbol) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 20000; ++j) {
    best = std::min(best, std::abs(evaluate_symbol(symbol, 2.0 * std::numbers::pi * j / 20000)));
  }
  return best;
}

}  // namespace

TEST_CASE("graded operator checks anticommutation", "[operators]") {
  Matrix d(2, 2);
  d << 0, 2, 2, 0;
  const GradedOperator g(HermitianOperator(d), {1, -1});
  CHECK(g.plus_block()(0, 0) == Complex(2.0));
  CHECK((g.grading_operator().matrix() * d + d * g.grading_operator().matrix()).norm() == 0.0);
  CHECK(code_of([&] { GradedOperator(HermitianOperator(d), {1, 1}); }) == ErrorCode::ValidationError);
  CHECK_THROWS(GradedOperator(HermitianOperator(d), {1, 0}));
}

TEST_CASE("circle model with pure winding", "[operators][circle]") {
  const ModelInstance m = build_circle_model(60, {{1, Complex(1.0)}});
  CHECK(m.parity == Parity::Odd);
  CHECK(m.dim() == 121);
  CHECK_THAT(m.k_rep_gap, WithinAbs(1.0, 1e-12));
  CHECK((m.k_rep.adjoint() * m.k_rep - Matrix::Identity(121, 121)).norm() < 1e-12);
  REQUIRE(m.commutator);
  CHECK_THAT(m.commutator->interior, WithinAbs(1.0, 1e-10));
  CHECK(raw_oracle(m) == 1);
}

TEST_CASE("circle model with a shifted symbol", "[operators][circle]") {
  const std::vector<SymbolTerm> symbol{{1, Complex(1.0)}, {0, Complex(0.5)}};
  const ModelInstance m = build_circle_model(200, symbol);
  CHECK_THAT(m.k_rep_gap, WithinAbs(symbol_minimum(symbol), 1e-4));
  CHECK_THAT(m.k_rep_norm, WithinAbs(1.5, 1e-12));
  REQUIRE(m.commutator);
  CHECK_THAT(m.commutator->interior, WithinAbs(1.0, 1e-10));

  // Entries of [D, G] on interior rows are (n - m) G_nm = k c_k.
  const Matrix& d = m.dirac().matrix();
  const Matrix c = d * m.k_rep - m.k_rep * d;
  for (Index i = 10; i < m.dim() - 10; ++i) {
    CHECK(std::abs(c(i, i - 1) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(c(i, i)) < 1e-12);
  }
}

TEST_CASE("conjugate symbol negates the winding", "[operators][circle]") {
  const ModelInstance plus = build_circle_model(60, {{2, Complex(1.0)}});
  const ModelInstance minus = build_circle_model(60, {{-2, Complex(1.0)}});
  CHECK(raw_oracle(minus) == -raw_oracle(plus));
  CHECK(raw_oracle(plus) == 2);
}

TEST_CASE("singular symbols are rejected", "[operators][circle]") {
  CHECK(code_of([] { build_circle_model(60, {{1, Complex(1.0)}, {0, Complex(1.0)}}); }) ==
        ErrorCode::SingularSymbol);
}

TEST_CASE("QWZ Bloch Hamiltonian matches the real-space hopping", "[operators][qwz]") {
  // Plane wave on a torus of side 2L+1 with momentum on the discrete grid.
  const int box = 4;
  const int side = 2 * box + 1;
  const Matrix h = qwz_hamiltonian(box, 1.3);
  const double kx = 2.0 * std::numbers::pi * 2 / side;
  const double ky = 2.0 * std::numbers::pi * 5 / side;
  const Eigen::Matrix2cd hk = qwz_bloch(1.3, kx, ky);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(hk);
  for (int band = 0; band < 2; ++band) {
    Vector psi(2 * side * side);
    int site = 0;
    for (int x = -box; x <= box; ++x) {
      for (int y = -box; y <= box; ++y) {
        const Complex phase = std::exp(Complex(0.0, kx * x + ky * y));
        psi.segment(2 * site, 2) = phase * es.eigenvectors().col(band);
        ++site;
      }
    }
    CHECK((h * psi - es.eigenvalues()(band) * psi).norm() < 1e-10 * psi.norm());
  }
}

TEST_CASE("QWZ model gap and sizes", "[operators][qwz]") {
  const int box = 12;
  const int side = 2 * box + 1;
  const ModelInstance m = build_qwz_model(box, 1.0, Offset::HalfInteger, BuildOptions{false});
  CHECK(m.dim() == 4 * side * side);
  // Bloch minimum over the momenta the torus supports, and over a fine grid.
  auto bloch_min = [](int n) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto hk = qwz_bloch(1.0, 2 * std::numbers::pi * i / n, 2 * std::numbers::pi * j / n);
        best = std::min(best, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(hk)
                                  .eigenvalues()
                                  .cwiseAbs()
                                  .minCoeff());
      }
    }
    return best;
  };
  CHECK_THAT(m.k_rep_gap, WithinRel(bloch_min(side), 1e-10));
  CHECK_THAT(bloch_min(200), WithinAbs(1.0, 1e-12));
  CHECK_THAT(m.k_rep_gap, WithinRel(1.0, 1e-4));
  CHECK(m.k_rep_norm > 2.9);
  CHECK(m.k_rep_norm < 3.0 + 1e-9);
}

TEST_CASE("QWZ parameter validation", "[operators][qwz]") {
  CHECK(code_of([] { build_qwz_model(12, 2.0); }) == ErrorCode::GaplessMass);
  CHECK(code_of([] { build_qwz_model(12, 0.0); }) == ErrorCode::GaplessMass);
  CHECK_THROWS(build_qwz_model(4, 1.0));
}

TEST_CASE("QWZ commutator is bounded by the hopping", "[operators][qwz]") {
  const ModelInstance m = build_qwz_model(8, 1.0);
  REQUIRE(m.commutator);
  // hopping blocks have norm 1; four neighbours
  CHECK(m.commutator->interior <= 2.0 * 1.0 * 4.0);
  CHECK(m.commutator->interior > 0.5);
}

TEST_CASE("dual Dirac kernel counts", "[operators][qwz]") {
  const GradedOperator half = build_dual_dirac(8, Offset::HalfInteger, 1);
  const KernelCount kh = fredholm_index_graded(half, 7.5);
  CHECK(kh.ker_plus == 0);
  CHECK(kh.ker_minus == 0);

  const GradedOperator integer = build_dual_dirac(8, Offset::Integer, 1);
  const KernelCount ki = fredholm_index_graded(integer, 7.5);
  CHECK(ki.ker_plus == 1);
  CHECK(ki.ker_minus == 1);
  CHECK(ki.index == 0);
}

TEST_CASE("dual Dirac window rank counts lattice sites", "[operators][qwz]") {
  const int box = 12;
  const GradedOperator d = build_dual_dirac(box, Offset::HalfInteger, 2);
  const double rho = 8.0;
  int sites = 0;
  for (int x = -box; x <= box; ++x) {
    for (int y = -box; y <= box; ++y) {
      sites += std::hypot(x - 0.5, y - 0.5) <= rho ? 1 : 0;
    }
  }
  const SpectralWindow w = spectral_window(d.op(), rho);
  CHECK(w.rank == 2 * 2 * sites);
}

TEST_CASE("weighted shift model", "[operators][shift]") {
  const ModelInstance m1 = build_weighted_shift_dirac(40, 1);
  CHECK(raw_oracle(m1) == -1);
  const KernelCount k = fredholm_index_graded(*m1.graded_dirac, 10.5);
  CHECK(k.ker_plus == 0);
  CHECK(k.ker_minus == 1);
  const ModelInstance m3 = build_weighted_shift_dirac(40, 3);
  CHECK(raw_oracle(m3) == -3);
  CHECK(raw_oracle(build_weighted_shift_dirac(40, 2, -1)) == 0);

  // |D| spectrum inside rho = 10.5: 0 once, 1..10 twice.
  const SpectralWindow w = spectral_window(m1.dirac(), 10.5);
  CHECK(w.rank == 21);
  const RealVector ev = linalg::eigenvalues_hermitian(compress(m1.dirac().matrix(), w.indices));
  std::map<long, int> multiplicity;
  for (Index i = 0; i < ev.size(); ++i) multiplicity[std::lround(std::abs(ev(i)))]++;
  CHECK(multiplicity[0] == 1);
  for (long v = 1; v <= 10; ++v) CHECK(multiplicity[v] == 2);
}

TEST_CASE("model round trip through a manifest", "[operators][io]") {
  test::TempDir dir("roundtrip");
  const ModelInstance m = build_circle_model(60, {{1, Complex(1.0)}});
  const auto manifest = save_model(m, dir.path());
  const ModelInstance back = load_model(manifest);
  CHECK(back.parity == Parity::Odd);
  CHECK(back.dirac().matrix() == m.dirac().matrix());
  CHECK(back.k_rep == m.k_rep);
  CHECK(back.interior == m.interior);
  CHECK(back.containment_radius == m.containment_radius);
  CHECK(raw_oracle(back) == 1);

  const ModelInstance even = build_weighted_shift_dirac(20, 2, 1);
  const auto em = save_model(even, dir.path() / "even");
  const ModelInstance eback = load_model(em);
  REQUIRE(eback.graded_dirac);
  CHECK(eback.graded_dirac->grading() == even.graded_dirac->grading());
  CHECK(eback.dirac().matrix() == even.dirac().matrix());
  CHECK(raw_oracle(eback) == -2);
}

TEST_CASE("tampered manifests are rejected", "[operators][io]") {
  test::TempDir dir("tamper");
  const ModelInstance even = build_weighted_shift_dirac(20, 1, 1);
  const auto manifest = save_model(even, dir.path());

  SECTION("missing grading") {
    std::ifstream in(manifest);
    std::stringstream buf;
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("grading", 0) != 0) buf << line << '\n';
    }
    in.close();
    std::ofstream(manifest) << buf.str();
    CHECK(code_of([&] { load_model(manifest); }) == ErrorCode::ValidationError);
  }

  SECTION("non-Hermitian Dirac entry") {
    Matrix d = mm::read_file(dir.path() / "dirac.mtx");
    d(1, 0) += Complex(0.0, 0.5);
    mm::write_file(dir.path() / "dirac.mtx", d);
    try {
      load_model(manifest);
      FAIL("expected ValidationError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ValidationError);
      CHECK_THAT(std::string(e.what()), ContainsSubstring("herm_tol"));
    }
  }

  SECTION("singular representative") {
    Matrix k = mm::read_file(dir.path() / "k_rep.mtx");
    k(0, 0) = 0.0;
    mm::write_file(dir.path() / "k_rep.mtx", k);
    CHECK(code_of([&] { load_model(manifest); }) == ErrorCode::ValidationError);
  }
}

TEST_CASE("matrix market round trip", "[operators][io]") {
  std::mt19937_64 rng(2);
  const Matrix a = test::random_complex(rng, 5, 4);
  std::stringstream s;
  mm::write(s, a, mm::Layout::Array);
  CHECK(mm::read(s) == a);
  const Matrix h = test::random_hermitian(rng, 6);
  std::stringstream t;
  mm::write(t, h, mm::Layout::Coordinate, mm::Symmetry::Hermitian);
  CHECK(mm::read(t) == h);
  std::stringstream bad("%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1.0 0.0\n");
  CHECK(code_of([&] { mm::read(bad); }) == ErrorCode::FormatError);
}
