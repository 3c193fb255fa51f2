#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sepint/catalog.hpp"
#include "sepint/detsolve.hpp"

using namespace sepint;
using namespace sepint::detsolve;

namespace {

Potential1D poly(std::string label, double c4, double c2) {
  return Potential1D::closed_form(std::move(label), [=](auto t) { return c4 * t * t * t * t + c2 * t * t; });
}

SeparablePotential quartic_pair(double hbar) { return {poly("x^4", 1, 0), poly("y^2", 0, 1), hbar}; }

GridSpec point(double x, double y) {
  GridSpec g;
  g.x = {x, x};
  g.y = {y, y};
  g.nx = g.ny = 1;
  return g;
}

GridSpec square(double lo, double hi, int n = 21) {
  GridSpec g;
  g.x = {lo, hi};
  g.y = {lo, hi};
  g.nx = g.ny = n;
  return g;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

// Linear compatibility condition written out for V1 = x^4, V2 = y^2 and A300 = 1:
// f1 = -y^3, f2 = 3xy^2, f3 = -3x^2 y, f4 = x^3.
double compat_quartic_cube(double x, double y) {
  const double V1p = 4 * x * x * x, V1pp = 12 * x * x, V1ppp = 24 * x;
  const double V2p = 2 * y, V2pp = 2, V2ppp = 0;
  const double f2 = 3 * x * y * y, f3 = -3 * x * x * y;
  const double f2y = 6 * x * y, f3x = -6 * x * y, f1yy = -6 * y, f2xy = 6 * y, f3xx = -6 * y, f2yy = 6 * x,
               f3xy = -6 * x, f4xx = 6 * x;
  return -f3 * V1ppp - f2 * V2ppp + 2 * (f2y - f3x) * (V1pp - V2pp) + (-3 * f1yy + 2 * f2xy - f3xx) * V1p +
         (-f2yy + 2 * f3xy - 3 * f4xx) * V2p;
}

}  // namespace

TEST_CASE("determining equations for the linear-plus-barrier entry") {
  auto inst = catalog::instantiate("Q.14", {{"a", 1}, {"hbar", 1}});
  const auto r = residual_determining(inst.potential, inst.integrals[2], square(0.3, 2.3));
  for (const auto& e : r.equations) CHECK(e.max_abs <= 1e-12);
  CHECK(r.pass);
}

TEST_CASE("zero data gives zero residuals") {
  SeparablePotential V{Potential1D::zero(), Potential1D::zero(), 1.0};
  ThirdOrderIntegral I;
  I.corrections = zero_corrections();
  const auto r = residual_determining(V, I, square(-1, 1));
  for (const auto& e : r.equations) CHECK(e.raw_max == 0.0);
  const auto lc = residual_linear_compat(V, CoeffTensor{}, square(-1, 1));
  CHECK(lc.max_abs() == 0.0);
  const auto q = catalog::instantiate("Q.9", {});
  CHECK(residual_linear_compat(q.potential, CoeffTensor{}, square(-1, 1)).max_abs() == 0.0);
}

TEST_CASE("mismatched pair violates the y first-order equation") {
  // with A012 = 1, g2 = a y (a = 1): g2_y = 1 but f3 V1' = 4x^3 = 4 at (1, 1)
  auto inst = catalog::instantiate("Q.14", {{"a", 1}, {"hbar", 1}});
  const auto r = residual_determining(quartic_pair(1.0), inst.integrals[2], point(1, 1));
  CHECK(r.at("eq9").raw_max == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.at("eq9").max_abs > 0.1);
  CHECK(!r.pass);
}

TEST_CASE("linear compatibility condition") {
  CoeffTensor cube;
  cube.a300 = 1;
  SeparablePotential iso{poly("x^2", 0, 1.7), poly("y^2", 0, 1.7), 0.0};
  CHECK(residual_linear_compat(iso, cube, square(-2, 2)).max_abs() <= 1e-14);

  const auto r = residual_linear_compat(quartic_pair(0.0), cube, point(1, 1));
  CHECK(r.equations.front().raw_max == doctest::Approx(std::abs(compat_quartic_cube(1, 1))).epsilon(1e-14));
  CHECK(compat_quartic_cube(1, 1) == 384.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    const double x = u(rng), y = u(rng);
    const auto s = residual_linear_compat(quartic_pair(0.0), cube, point(x, y));
    CHECK(s.equations.front().raw_max == doctest::Approx(std::abs(compat_quartic_cube(x, y))).epsilon(1e-12));
  }
}

TEST_CASE("grids must keep clear of singular lines") {
  auto inst = catalog::instantiate("Q.13", {});
  CHECK_THROWS_AS(residual_determining(inst.potential, inst.integrals[0], square(-1, 1)), SingularPointError);
}

TEST_CASE("one-dimensional reduced equations") {
  auto inv = Potential1D::closed_form("1/x^2", [](auto x) { return 1.0 / (x * x); }, {0.0});
  const auto xs = linspace(0.3, 2.3, 41);
  CHECK(ode_residual_11(inv, 1, 0, 0, 0, 0, xs).max_abs() <= 1e-13);

  auto lin = Potential1D::closed_form("3x", [](auto x) { return 3.0 * x; });
  CHECK(ode_residual_11(lin, 0, 0.7, -1.1, 0, 0, xs).max_abs() == 0.0);

  auto x4 = poly("x^4", 1, 0);
  CHECK(ode_residual_11(x4, 0, 0, 1, 24, 0, xs).max_abs() <= 1e-14);
  CHECK(ode_residual_11(x4, 0, 0, 1, 0, 0, xs).max_abs() > 0.5);

  // mirrored equation: x -> y, A210 -> A201, A111 -> -A111, A012 -> A021
  auto y3 = Potential1D::closed_form("y^3", [](auto y) { return y * y * y; });
  const auto r11 = ode_residual_11(y3, 0.4, 0.9, 1.3, 2.0, -1.0, xs);
  const auto r12 = ode_residual_12(y3, 0.4, -0.9, 1.3, 2.0, -1.0, xs);
  CHECK(r11.equations.front().raw_max == doctest::Approx(r12.equations.front().raw_max).epsilon(1e-15));
}

TEST_CASE("homogeneous families") {
  const auto xs = linspace(1.3, 3.3, 41);
  FamilyParams p;
  p.alpha = 1;
  p.c1 = 1;
  const auto a1 = fit_homogeneous_family(Family::A1, p, 1, 0, -1, xs);
  CHECK(a1.residual <= 1e-12);

  const auto a7 = fit_homogeneous_family(Family::A7, p, 0, 0, 1, xs);
  CHECK(a7.residual == 0.0);
  CHECK(a7.rhs_a == 0.0);
  CHECK(a7.rhs_b == 0.0);

  FamilyParams q;
  q.c1 = 0.6;
  const auto a4 = fit_homogeneous_family(Family::A4, q, 0, 0, 2.5, xs);
  CHECK(a4.rhs_a == doctest::Approx(24 * 2.5 * 0.6).epsilon(1e-12));
  CHECK(std::abs(a4.rhs_b) <= 1e-11);
  CHECK(a4.residual <= 1e-12);

  CHECK_THROWS_AS(fit_homogeneous_family(Family::A4, q, 1, 0, 2.5, xs), ConfigMismatchError);
  CHECK_THROWS_AS(fit_homogeneous_family(Family::A3, q, 0, 0, 1, xs), ConfigMismatchError);
  CHECK(family_from_string("A.5") == Family::A5);
  CHECK(to_string(Family::A2) == "A.2");
}

TEST_CASE("every family member solves its reduced equation") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  const auto xs = linspace(1.3, 3.3, 31);
  for (int trial = 0; trial < 5; ++trial) {
    FamilyParams p{0.8, u(rng), u(rng), u(rng), u(rng)};
    const double A = 1.0 + trial;
    CHECK(fit_homogeneous_family(Family::A1, p, A, 0, -A * p.alpha * p.alpha, xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A2, p, A, 0, 0, xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A3, p, 0, A, 0, xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A4, p, 0, 0, A, xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A5, p, 0, u(rng), u(rng), xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A6, p, u(rng), u(rng), u(rng), xs).residual <= 1e-10);
    CHECK(fit_homogeneous_family(Family::A7, p, u(rng), u(rng), u(rng), xs).residual <= 1e-10);
  }
}

TEST_CASE("quadrature rebuilds the correction fields of the barrier entry") {
  auto inst = catalog::instantiate("C.3", {{"a", 1}, {"b", 1}, {"c", 1}});
  GridSpec g;
  g.x = inst.domain.x;
  g.y = inst.domain.y;
  g.nx = g.ny = 11;
  const auto q = solve_g_quadrature(inst.potential, inst.integrals[0].coeffs, {0.0, 1.3}, g);
  REQUIRE(q.feasible);
  CHECK(q.report.max_abs() <= 1e-9);
  // the value equation pins every gauge constant here, so the fields agree with the listed ones
  for (double x : {-0.8, 0.1, 0.9})
    for (double y : {0.4, 1.1, 2.2}) {
      const double wg1 = -2 * y * y + 2 / (y * y), wg2 = 8 * x * y + y;
      CHECK(q.fields.g1(x, y).value == doctest::Approx(wg1).epsilon(1e-9));
      CHECK(q.fields.g2(x, y).value == doctest::Approx(wg2).epsilon(1e-9));
    }
}

TEST_CASE("quadrature on the quantum counterpart") {
  auto inst = catalog::instantiate("Q.8", {});
  GridSpec g;
  g.x = inst.domain.x;
  g.y = inst.domain.y;
  g.nx = g.ny = 9;
  const auto q = solve_g_quadrature(inst.potential, inst.integrals[0].coeffs, {0.0, 1.3}, g);
  REQUIRE(q.feasible);
  const auto& ref = inst.integrals[0].corrections;
  for (double x : {-0.5, 0.6})
    for (double y : {0.7, 1.9}) {
      CHECK(q.fields.g1(x, y).dx == doctest::Approx(ref.g1(x, y).dx).epsilon(1e-9));
      CHECK(q.fields.g2(x, y).dy == doctest::Approx(ref.g2(x, y).dy).epsilon(1e-9));
    }
}

TEST_CASE("quadrature of trivial and infeasible data") {
  SeparablePotential zero{Potential1D::zero(), Potential1D::zero(), 1.0};
  const auto z = solve_g_quadrature(zero, CoeffTensor{}, {0, 0}, square(-1, 1, 7));
  CHECK(z.feasible);
  CHECK(z.fields.g1(0.3, -0.4).value == 0.0);
  CHECK(z.fields.g2(0.3, -0.4).value == 0.0);

  CoeffTensor A;
  A.a012 = 1;
  const auto bad = solve_g_quadrature(quartic_pair(1.0), A, {0, 0}, square(-1, 1, 11));
  CHECK(!bad.feasible);
  CHECK(bad.violating == "eq7");
  CHECK(bad.report.at("eq7").max_abs > 1e-3);
}

TEST_CASE("quadrature paths may not cross singular lines") {
  auto inst = catalog::instantiate("Q.13", {});
  GridSpec g = square(0.3, 2.3, 5);
  CHECK_THROWS_AS(solve_g_quadrature(inst.potential, inst.integrals[0].coeffs, {-1.0, 1.0}, g), DomainError);
}

TEST_CASE("central difference weights") {
  auto w = central_weights(1, 1);
  CHECK(w[0] == doctest::Approx(-0.5));
  CHECK(w[1] == doctest::Approx(0.0));
  CHECK(w[2] == doctest::Approx(0.5));
  w = central_weights(2, 1);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(-2.0));
  w = central_weights(1, 2);
  CHECK(static_cast<double>(w[0]) == doctest::Approx(1.0 / 12));
  CHECK(static_cast<double>(w[1]) == doctest::Approx(-2.0 / 3));
  // weights of order-m derivatives annihilate polynomials of degree < m and reproduce x^m / m!
  for (int m = 1; m <= 3; ++m) {
    const int r = 4;
    const auto ww = central_weights(m, r);
    for (int deg = 0; deg <= m; ++deg) {
      long double s = 0;
      for (int k = -r; k <= r; ++k) s += ww[static_cast<std::size_t>(k + r)] * std::pow(static_cast<long double>(k), deg);
      const long double want = deg == m ? std::tgamma(m + 1.0) : 0.0;
      CHECK(static_cast<double>(std::abs(s - want)) <= 1e-12);
    }
  }
}

TEST_CASE("commutator oracle convergence") {
  auto inst = catalog::instantiate("Q.14", {{"a", 1}, {"hbar", 1}});
  const auto& X3 = inst.integrals[2];
  const GaussianTest psi{0, 1.5, 0.3};
  const auto good = commutator_convergence(inst.potential, X3, psi, {-0.9, 0.9}, {0.9, 2.1}, 0.1, 3);
  REQUIRE(good.residual.size() == 3);
  CHECK(good.residual[1] < good.residual[0]);
  CHECK(good.residual[2] < good.residual[1]);
  for (double o : good.observed_order) CHECK(o >= 3.0);
  CHECK(std::abs(good.limit) <= 1e-4 * good.residual[0]);

  SeparablePotential broken{Potential1D::closed_form("x^4", [](auto x) { return x * x * x * x; }), inst.potential.v2,
                            1.0};
  const auto bad = commutator_convergence(broken, X3, psi, {-0.9, 0.9}, {0.9, 2.1}, 0.1, 3);
  CHECK(bad.limit > 1.0);
  CHECK(std::abs(bad.residual[2] - bad.limit) <= 0.01 * bad.limit);
}

TEST_CASE("commutator oracle preconditions") {
  auto inst = catalog::instantiate("Q.14", {});
  const GaussianTest psi{0, 1.5, 0.3};
  SeparablePotential classical = inst.potential;
  classical.hbar = 0.0;
  CHECK_THROWS_AS(commutator_oracle(classical, inst.integrals[2], psi, square(0.9, 2.1)), PreconditionError);
  CHECK_THROWS_AS(commutator_oracle(inst.potential, inst.integrals[0], psi, square(0.9, 2.1)), PreconditionError);
  GridSpec coarse;
  coarse.x = {-0.9, 0.9};
  coarse.y = {0.9, 2.1};
  coarse.nx = 4;
  coarse.ny = 3;
  CHECK(commutator_oracle(inst.potential, inst.integrals[2], psi, coarse).coarse_warning);
}
