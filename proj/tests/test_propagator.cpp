#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "dirac/propagator.hpp"
#include "test_support.hpp"

using namespace dirac;
using dirac::testing::error_code_of;
using dirac::testing::kPi;

namespace {

double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

SolutionState start_at(double x, Vector2c y) {
  SolutionState s;
  s.x = x;
  s.y = y;
  return s;
}

}  // namespace

TEST_CASE("first_order_form examples") {
  const auto free = dirac::testing::free_problem();
  Matrix2c expected;
  expected << 0.0, -3.0, 3.0, 0.0;
  CHECK(max_abs(first_order_form(free, 1.0, 3.0) - expected) == 0.0);

  const auto pot = free.with_potential(PotentialSpec::uniform(PotentialPiece::constant(1, 0, 0)));
  expected << 0.0, 0.0, -1.0, 0.0;
  CHECK(max_abs(first_order_form(pot, 0.5, 0.0) - expected) == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const auto p = dirac::testing::random_problem(rng);
    const double x = p.a() + (p.b() - p.a()) * (u(rng) + 3.0) / 6.0;
    CHECK(std::abs(first_order_form(p, x, Complex(u(rng), u(rng))).trace()) < 1e-14);
  }
}

TEST_CASE("propagate_interval with zero potential is the exact rotation") {
  const auto free = dirac::testing::free_problem();
  const auto s = propagate_interval(free, 0, 1.0, 0.0, kPi / 2, start_at(0.0, {1.0, 0.0}));
  CHECK(std::abs(s.y1()) < 1e-15);
  CHECK(std::abs(s.y2() - 1.0) < 1e-15);
  CHECK(s.x == kPi / 2);

  const auto same = propagate_interval(free, 0, 7.3, 1.2, 1.2, start_at(1.2, {0.3, -0.4}));
  CHECK(same.y1() == Complex(0.3));
  CHECK(same.y2() == Complex(-0.4));

  // Direct closed form (cos s, sin s), and composition of two half steps.
  for (double lam : {0.5, 10.0, 123.4, 333.0}) {
    const double x1 = 3.0;
    const auto whole = propagate_interval(free, 0, lam, 0.0, x1, start_at(0.0, {1.0, 0.0}));
    const auto half = propagate_interval(free, 0, lam, 0.0, x1 / 2, start_at(0.0, {1.0, 0.0}));
    const auto twice = propagate_interval(free, 0, lam, x1 / 2, x1, half);
    CHECK(std::abs(whole.y1() - std::cos(lam * x1)) <= 1e-12);
    CHECK(std::abs(whole.y2() - std::sin(lam * x1)) <= 1e-12);
    CHECK(std::abs(whole.y1() - twice.y1()) <= 1e-12);
    CHECK(std::abs(whole.y2() - twice.y2()) <= 1e-12);
  }
}

TEST_CASE("constant potential agrees with the matrix exponential") {
  const double v0 = 0.3;
  const auto p = dirac::testing::constant_potential_problem(v0);
  IntegratorOptions numerical;
  numerical.force_numerical = true;
  for (Complex lam : {Complex(0.0), Complex(1.7), Complex(-4.2), Complex(2.0, 0.5), Complex(25.0)}) {
    const Vector2c y0(0.6, -0.8);
    Matrix2c m;
    m << 0.0, v0 - lam, lam - v0, 0.0;
    const Vector2c oracle = (m * kPi).exp() * y0;
    const auto fast = propagate_interval(p, 0, lam, 0.0, kPi, start_at(0.0, y0));
    const auto rk = propagate_interval(p, 0, lam, 0.0, kPi, start_at(0.0, y0), numerical);
    CHECK((fast.value() - oracle).norm() <= 1e-9 * (1.0 + oracle.norm()));
    // Classical RK4 at 0.02 rad per step.
    CHECK((rk.value() - oracle).norm() <= 1e-6 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("transmission_jump examples") {
  Matrix2c id = Matrix2c::Identity();
  CHECK(max_abs(transmission_jump({1.0, 1.0, {}}, 4.0) - id) == 0.0);
  Matrix2c expected;
  expected << 2.0, 0.0, 0.0, 0.5;
  CHECK(max_abs(transmission_jump({1.0, 2.0, {}}, 17.0) - expected) == 0.0);
  expected << 1.0, 0.0, 3.0, 1.0;
  const TransmissionData shear{1.0, 1.0, RealPolynomial{0.0, 1.0}};
  CHECK(max_abs(transmission_jump(shear, 3.0) - expected) == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const TransmissionData td{0.0, u(rng) + (u(rng) < 0 ? -5.1 : 5.1),
                              dirac::testing::random_polynomial(rng, 3, false)};
    const Complex lam(u(rng), u(rng));
    const auto t = transmission_jump(td, lam);
    CHECK(std::abs(t.determinant() - 1.0) <= 1e-14);
    CHECK(max_abs(t * transmission_jump_inverse(td, lam) - id) <= 1e-12 * (1 + max_abs(t)));
  }
}

TEST_CASE("phi and psi satisfy their initial conditions and closed forms") {
  const auto free = dirac::testing::free_problem();
  for (double lam : {0.0, 0.7, 3.0, -11.5}) {
    for (double x : {0.0, 0.4, 1.9, kPi}) {
      const auto f = phi(free, x, lam);
      CHECK(std::abs(f.y1() - std::cos(lam * x)) <= 1e-13);
      CHECK(std::abs(f.y2() - std::sin(lam * x)) <= 1e-13);
      const auto g = psi(free, x, lam);
      CHECK(std::abs(g.y1() - std::cos(lam * (x - kPi))) <= 1e-13);
      CHECK(std::abs(g.y2() - std::sin(lam * (x - kPi))) <= 1e-13);
    }
  }

  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto p = dirac::testing::random_problem(rng);
    const Complex lam(2.5, -0.3);
    const auto fa = phi(p, p.a(), lam);
    CHECK(std::abs(fa.y1() - eval_poly(p.boundary().a2, lam)) <= 1e-15);
    CHECK(std::abs(fa.y2() - eval_poly(p.boundary().a1, lam)) <= 1e-15);
    const auto gb = psi(p, p.b(), lam);
    CHECK(std::abs(gb.y1() - eval_poly(p.boundary().b2, lam)) <= 1e-15);
    CHECK(std::abs(gb.y2() - eval_poly(p.boundary().b1, lam)) <= 1e-15);
  }
}

TEST_CASE("phi across a theta = 2 jump") {
  // phi(pi/2 - 0) = (c, s) with c = cos(lambda pi/2), s = sin(lambda pi/2);
  // the jump gives (2c, s/2) and rotating by lambda pi/2 gives
  // phi2(pi) = s * 2c + c * s/2 = (5/4) sin(lambda pi).
  const auto p = dirac::testing::single_jump_problem(2.0, {});
  for (double lam : {0.3, 1.0, 2.25, 7.7, -3.1}) {
    CHECK(std::abs(phi(p, kPi, lam).y2() - 1.25 * std::sin(lam * kPi)) <= 1e-12);
    const auto left = phi(p, kPi / 2, lam, Limit::kLeft);
    const auto right = phi(p, kPi / 2, lam, Limit::kRight);
    CHECK(left.limit == Limit::kLeft);
    CHECK(right.limit == Limit::kRight);
    CHECK(std::abs(right.y1() - 2.0 * left.y1()) <= 1e-14);
    CHECK(std::abs(right.y2() - 0.5 * left.y2()) <= 1e-14);
  }
}

TEST_CASE("jump inverse then forward reproduces the state") {
  const auto p = dirac::testing::transmission_problem();
  const Complex lam(1.3, 0.2);
  const auto right = psi(p, kPi / 2, lam, Limit::kRight);
  const auto left = psi(p, kPi / 2, lam, Limit::kLeft);
  const auto& td = p.transmissions()[0];
  CHECK((transmission_jump_inverse(td, lam) * right.value() - left.value()).norm() <= 1e-14);
  CHECK((transmission_jump(td, lam) * left.value() - right.value()).norm() <= 1e-14);
}

TEST_CASE("wronskian examples and position checks") {
  const auto u = start_at(0.5, {1.0, 0.0});
  const auto v = start_at(0.5, {0.0, 1.0});
  CHECK(wronskian(u, v) == Complex(1.0));
  CHECK(wronskian(u, u) == Complex(0.0));
  CHECK(error_code_of([&] { wronskian(u, start_at(0.6, {0.0, 1.0})); }) ==
        ErrorCode::kPositionMismatch);
  auto w = v;
  w.limit = Limit::kLeft;
  CHECK(error_code_of([&] { wronskian(u, w); }) == ErrorCode::kPositionMismatch);
}

TEST_CASE("wronskian of psi and phi is constant in x") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 15; ++k) {
    const auto p = dirac::testing::random_problem(rng);
    const double lam = 20.0 * u(rng) - 10.0;
    const Complex w0 = wronskian(psi(p, p.a(), lam), phi(p, p.a(), lam));
    const double tol = std::max(1e-7 * std::abs(w0), 1e-9);
    for (int j = 1; j <= 8; ++j) {
      const double x = std::min(p.b(), p.a() + (p.b() - p.a()) * j / 8.0);
      CHECK(std::abs(wronskian(psi(p, x, lam), phi(p, x, lam)) - w0) <= tol);
    }
    for (const auto& td : p.transmissions()) {
      for (Limit side : {Limit::kLeft, Limit::kRight}) {
        const auto f = phi(p, td.xi, lam, side);
        const auto g = psi(p, td.xi, lam, side);
        CHECK(std::abs(wronskian(g, f) - w0) <= tol);
      }
    }
  }
}

TEST_CASE("real data at real lambda gives real solutions") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto p = dirac::testing::random_problem(rng);
    const double x = 0.5 * (p.a() + p.b());
    const auto f = phi(p, x, 4.2);
    const auto g = psi(p, x, -2.9);
    CHECK(std::abs(f.y1().imag()) + std::abs(f.y2().imag()) <= 1e-13);
    CHECK(std::abs(g.y1().imag()) + std::abs(g.y2().imag()) <= 1e-13);
  }
}

TEST_CASE("propagation is reversible") {
  PotentialSpec pot = PotentialSpec::uniform(
      PotentialPiece::poly(RealPolynomial{0.2, 0.5}, RealPolynomial{0.0, 0.0, -0.3},
                           RealPolynomial{1.0}));
  const DiracProblem p(0.0, 2.0, {1.3}, {}, dirac::testing::dirichlet_like(), pot);
  const Vector2c y0(0.8, 0.6);
  for (Complex lam : {Complex(0.0), Complex(3.5), Complex(-12.0, 0.4)}) {
    const auto fwd = propagate_interval(p, 0, lam, 0.0, 1.7, start_at(0.0, y0));
    const auto back = propagate_interval(p, 0, lam, 1.7, 0.0, fwd);
    CHECK((back.value() - y0).norm() <= 1e-8);
  }
}

TEST_CASE("function potentials integrate like the equivalent polynomial") {
  const auto poly = PotentialPiece::poly(RealPolynomial{0.1, 0.4}, RealPolynomial{0.3},
                                         RealPolynomial{0.0, 0.0, 0.2});
  const auto func = PotentialPiece::function([](double x) {
    return PotentialValue{0.1 + 0.4 * x, 0.3, 0.2 * x * x};
  });
  const auto bc = dirac::testing::dirichlet_like();
  const DiracProblem pp(0.0, 2.0, {1.0}, {}, bc, PotentialSpec::uniform(poly));
  const DiracProblem pf(0.0, 2.0, {1.0}, {}, bc, PotentialSpec::uniform(func));
  const auto a = phi(pp, 2.0, 5.5);
  const auto b = phi(pf, 2.0, 5.5);
  CHECK((a.value() - b.value()).norm() <= 1e-13);
}

TEST_CASE("large imaginary lambda is carried in the exponent") {
  const auto free = dirac::testing::free_problem();
  const Complex lam(0.0, 1000.0);
  const auto f = phi(free, kPi, lam);
  const auto g = psi(free, kPi, lam);
  CHECK(std::isfinite(f.y(0).real()));
  CHECK(f.log_scale > 100.0);
  const auto [mantissa, exponent] = wronskian_scaled(g, f);
  // Delta = sin(i 1000 pi) = i sinh(1000 pi), so log|Delta| = 1000 pi - log 2.
  CHECK(std::log(std::abs(mantissa)) + exponent == doctest::Approx(1000.0 * kPi - std::log(2.0)));
  CHECK(error_code_of([&] { wronskian(g, f); }) == ErrorCode::kNonFinite);
}

TEST_CASE("steps below the resolution limit are rejected") {
  const auto pot = PotentialSpec::uniform(
      PotentialPiece::poly(RealPolynomial{0.0, 1.0}, RealPolynomial{}, RealPolynomial{}));
  const DiracProblem p(0.0, 1.0, {1.0}, {}, dirac::testing::dirichlet_like(), pot);
  CHECK(error_code_of([&] { phi(p, 1.0, 1e20); }) == ErrorCode::kStepUnderflow);
}

TEST_CASE("phi_samples matches pointwise phi") {
  const auto p = dirac::testing::transmission_problem();
  const auto grid = interval_grid(p, {5, 7});
  REQUIRE(grid.size() == 12);
  const auto samples = phi_samples(p, 2.3, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ref = phi(p, grid[i].x, 2.3, grid[i].side == Limit::kRight ? Limit::kRight : Limit::kLeft);
    CHECK((samples[i].value() - ref.value()).norm() <= 1e-13);
  }
}
