#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "sepint/catalog.hpp"
#include "sepint/detsolve.hpp"
#include "sepint/implicit.hpp"

using namespace sepint;
using namespace sepint::implicit;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

// The quartic relation expanded by hand into powers of V (long double), for the root-scan oracle.
long double quartic_in_v(long double a, long double c, long double d, long double x, long double V) {
  const long double q = a * x * x;
  // (9V - q)(V - q)^3 = 9V^4 - 28 q V^3 + 30 q^2 V^2 - 12 q^3 V + q^4
  const long double rhs = 9 * V * V * V * V - 28 * q * V * V * V + 30 * q * q * V * V - 12 * q * q * q * V + q * q * q * q;
  // 2d(V - q)(3V + q) = 6d V^2 - 4d q V - 2d q^2
  const long double lhs = c * x * x - d * d + 6 * d * V * V - 4 * d * q * V - 2 * d * q * q;
  return lhs - rhs;
}

long double cubic_in_v(long double b, long double d, long double x, long double V) {
  return V * V * V - 2 * b * x * V * V + b * b * x * x * V - d;
}

Potential1D quad(double a) {
  return Potential1D::closed_form("a x^2", [a](auto x) { return a * x * x; });
}

}  // namespace

TEST_CASE("degenerate quartic relation has the two oscillator branches") {
  RelationParams p;
  p.a = 1.3;
  for (double x : {0.4, 0.7, 1.5, -2.0}) {
    const auto r = scan_roots(Relation::case_i, p, x, {-10, 10});
    REQUIRE(r.size() == 2);
    const double lo = p.a * x * x / 9, hi = p.a * x * x;
    CHECK(std::abs(r[0] - lo) <= 4 * kEps * lo);
    CHECK(std::abs(r[1] - hi) <= 4 * kEps * hi);
  }
  const auto grid = linspace(0.2, 2.0, 37);
  const auto t = solve_case_i_branch(p.a, 0, 0, grid, {0.2, p.a * 0.04 / 9});
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(t.v[i] - p.a * grid[i] * grid[i] / 9) <= 8 * kEps * t.v[i]);
}

TEST_CASE("quartic relation at the interpolation parameters") {
  // a = 1, d~ = 1: c = 128/729, d = 4/27, and V = 2/9 at x = 0 balances both sides at 16/729
  RelationParams p{1, 0, 128.0 / 729, 4.0 / 27};
  CHECK(std::abs(relation_value(Relation::case_i, p, 0.0, 2.0 / 9)) <= 1e-15);
  const auto r = scan_roots(Relation::case_i, p, 0.0, {-5, 5});
  // 2/9 is a double root here, so its polish is limited to about sqrt(eps)
  CHECK(std::any_of(r.begin(), r.end(), [](double v) { return std::abs(v - 2.0 / 9) <= 1e-8; }));
}

TEST_CASE("generic quartic branch against a dense scan") {
  const double a = 1, c = 1, d = 1;
  auto f = [&](double x) { return [=](long double V) { return quartic_in_v(a, c, d, x, V); }; };
  for (double x : {0.3, 0.6, 1.0, 1.3}) {
    const auto want = oracle::scan_roots(f(x), -10, 10, 1e-3);
    const auto got = scan_roots(Relation::case_i, {a, 0, c, d}, x, {-10, 10});
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-10));
  }
  const auto seed = oracle::scan_roots(f(0.6), -10, 10, 1e-3);
  const auto grid = linspace(0.6, 1.0, 41);
  const auto t = solve_case_i_branch(a, c, d, grid, {0.6, seed.front()});
  const auto at1 = oracle::scan_roots(f(1.0), -10, 10, 1e-3);
  CHECK(t.v.back() == doctest::Approx(at1.front()).epsilon(1e-10));
  for (double r : t.residuals()) CHECK(r <= 1e-10);
}

TEST_CASE("branch continuity") {
  const RelationParams p{1, 0, 1, 1};
  const auto grid = linspace(0.3, 1.2, 91);
  const auto seed = scan_roots(Relation::case_i, p, 0.3, {-10, 10});
  const auto t = solve_case_i_branch(1, 1, 1, grid, {0.3, seed.front()});
  double slope = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = 1e-6;
    const double Fx = (relation_value(Relation::case_i, p, grid[i] + h, t.v[i]) -
                       relation_value(Relation::case_i, p, grid[i] - h, t.v[i])) / (2 * h);
    const double FV = (relation_value(Relation::case_i, p, grid[i], t.v[i] + h) -
                       relation_value(Relation::case_i, p, grid[i], t.v[i] - h)) / (2 * h);
    slope = std::max(slope, std::abs(Fx / FV));
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK(std::abs(t.v[i] - t.v[i - 1]) <= 1.5 * slope * (grid[i] - grid[i - 1]));
}

TEST_CASE("continuation refuses turning points and bad seeds") {
  // the two lowest roots at x = -1.5 merge before x = -1.4
  const auto grid = linspace(-1.5, -1.3, 21);
  const auto seed = scan_roots(Relation::case_i, {1, 0, 1, 1}, -1.5, {-10, 10});
  REQUIRE(seed.size() == 4);
  CHECK_THROWS_AS(solve_case_i_branch(1, 1, 1, grid, {-1.5, seed.front()}), BranchTurningError);
  CHECK_THROWS_AS(solve_case_i_branch(1, 1, 1, grid, {-1.5, seed.front() + 0.1}), SeedInvalidError);
  CHECK_THROWS_AS(solve_case_i_branch(1, 1, 1, grid, {3.0, 1.0}), SeedInvalidError);
}

TEST_CASE("cubic relation") {
  RelationParams p;
  p.b = 1.7;
  for (double x : {0.5, 2.0, -1.0}) {
    const auto r = scan_roots(Relation::case_ii, p, x, {-10, 10});
    REQUIRE(r.size() == 2);
    const double bx = p.b * x;
    CHECK(r[0] == std::min(0.0, bx));
    CHECK(std::abs(r[1] - std::max(0.0, bx)) <= 2 * kEps * std::abs(bx));
  }
  RelationParams q{0, 2.5, 0, 4};
  const auto r0 = scan_roots(Relation::case_ii, q, 0.0, {-10, 10});
  REQUIRE(r0.size() == 1);
  CHECK(std::abs(r0[0] - std::cbrt(4.0)) <= 2 * kEps * r0[0]);

  auto f = [](long double V) { return cubic_in_v(1, 1, 2, V); };
  const auto want = oracle::scan_roots(f, -10, 10, 1e-3);
  const auto got = scan_roots(Relation::case_ii, {0, 1, 0, 1}, 2.0, {-10, 10});
  REQUIRE(got.size() == 3);
  REQUIRE(want.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));

  const auto grid = linspace(2.0, 4.0, 41);
  const auto t = solve_case_ii_branch(1, 1, grid, {2.0, got.back()});
  for (double r : t.residuals()) CHECK(r <= 1e-10);
  const auto end = oracle::scan_roots([](long double V) { return cubic_in_v(1, 1, 4, V); }, -10, 10, 1e-3);
  CHECK(t.v.back() == doctest::Approx(end.back()).epsilon(1e-10));
}

TEST_CASE("branch traces serialize") {
  const auto t = solve_case_ii_branch(1, 1, linspace(2.0, 2.2, 3), {2.0, 2.618033988749895});
  std::ostringstream os;
  t.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("x,V1,residual\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
  CHECK(to_string(Relation::case_ii) == "eq34");
}

TEST_CASE("interpolating oscillators") {
  auto o = build_interp_oscillator(9, 0, 1);
  CHECK(o.potential.value(-1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(o.potential.value(1) == doctest::Approx(9.0).epsilon(1e-15));
  auto o1 = build_interp_oscillator(1, 1, 1);
  CHECK(o1.potential.value(0) == doctest::Approx(4.0 / 9).epsilon(1e-15));
  CHECK(o1.c == doctest::Approx(128.0 / 729));
  CHECK(o1.d == doctest::Approx(4.0 / 27));
  CHECK_THROWS_AS(build_interp_oscillator(1, -1, 1), PreconditionError);
}

TEST_CASE("interpolating family matches continuation of the quartic relation") {
  for (double a : {1.0, 0.6}) {
    for (double dt : {1.0, 0.5}) {
      for (int sign : {1, -1}) {
        const auto o = build_interp_oscillator(a, dt, sign);
        // the minus root meets the branch point x^2 = d~/3; stay on one side of it
        const double hi = sign > 0 ? 2.0 : 0.9 * std::sqrt(dt / 3);
        const auto grid = linspace(0.05, hi, 60);
        const double v0 = o.potential.value(grid.front()) + o.offset_to_numerator_form;
        const auto t = solve_case_i_branch(a, o.c, o.d, grid, {grid.front(), v0});
        double worst = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
          worst = std::max(worst, std::abs(t.v[i] - o.potential.value(grid[i]) - o.offset_to_numerator_form));
        INFO("a ", a, " d~ ", dt, " sign ", sign);
        CHECK(worst <= 1e-8);
      }
    }
  }
}

TEST_CASE("first integral of the quartic case") {
  const auto grid = linspace(-2, 2, 41);
  for (double a : {1.0, -0.4})
    for (double hbar : {0.0, 1.0, 0.3}) {
      auto s = check_first_integral_case_i(quad(a), a, hbar, grid);
      for (double v : s.values) CHECK(std::abs(v - (-2 * a * hbar * hbar)) <= 64 * kEps * (1 + std::abs(a)));
      auto s9 = check_first_integral_case_i(quad(a / 9), a, hbar, grid);
      for (double v : s9.values) CHECK(std::abs(v - (-2 * a * hbar * hbar / 9)) <= 64 * kEps * (1 + std::abs(a)));
    }
}

TEST_CASE("first integral shifts predictably under a constant offset") {
  const double a = 0.8, hbar = 1.1, eps = 1e-3;
  auto v = Potential1D::closed_form("x^3 + x", [](auto x) { return x * x * x + x; });
  auto w = Potential1D::closed_form("x^3 + x + eps", [eps](auto x) { return x * x * x + x + eps; });
  const auto grid = linspace(-1.5, 1.5, 31);
  const auto s0 = check_first_integral_case_i(v, a, hbar, grid), s1 = check_first_integral_case_i(w, a, hbar, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i], V = x * x * x + x, Vp = 3 * x * x + 1;
    const double delta = 4 * x * (-3 * eps) * Vp + 6 * (2 * eps * V + eps * eps) + 12 * a * x * x * eps;
    CHECK(std::abs((s1.values[i] - s0.values[i]) - delta) <= 1e-10);
  }
}

TEST_CASE("first integral of the cubic case") {
  const auto grid = linspace(-2, 2, 41);
  for (double b : {1.0, -2.0}) {
    const double hbar = 0.7;
    auto lin = Potential1D::closed_form("b x", [b](auto x) { return b * x; });
    auto s = check_first_integral_case_ii(lin, b, hbar, grid);
    for (double v : s.values) CHECK(v == doctest::Approx(b * b * b * hbar * hbar).epsilon(1e-14));
    auto z = check_first_integral_case_ii(Potential1D::zero(), b, hbar, grid);
    for (double v : z.values) CHECK(v == 0.0);
  }
}

TEST_CASE("first integrals along the transcendent-built potentials") {
  catalog::InstantiateOptions o;
  o.working_domain = catalog::Box{{0.5, 2.0}, {-1, 1}};
  auto q18 = catalog::instantiate("Q.18", {}, o);
  const auto s = check_first_integral_case_i(q18.potential.v1, 1, 1, linspace(0.5, 2.0, 61));
  CHECK(s.relative_deviation() <= 1e-6);

  for (const char* id : {"Q.20", "Q.21"}) {
    auto inst = catalog::instantiate(id, {});
    const auto k = check_first_integral_case_ii(inst.potential.v1, inst.params.get("b"), inst.params.get("hbar"),
                                                linspace(inst.domain.x.lo, inst.domain.x.hi, 61));
    INFO(id);
    CHECK(k.relative_deviation() <= 1e-6);
  }
}

TEST_CASE("samples recompute their deviation") {
  const auto s = sample_from_values({0, 1, 2}, {1.0, 2.0, 4.5});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.max_deviation == doctest::Approx(2.0));
  CHECK(s.relative_deviation() == doctest::Approx(0.8));
}

TEST_CASE("W built from P4") {
  const double b = -8, hbar = 1, b1 = std::sqrt(8.0), K1 = 1;
  auto zero = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve4_zero_branch({-0.1, 2.1}, b, K1));
  auto w0 = w_from_p4(zero, b, hbar, b1, K1);
  for (double x : linspace(0.1, 1.9, 10)) {
    CHECK(w0.value(x) == doctest::Approx(-(b / 12) * x * x - (hbar * hbar * K1 - hbar * b1) / 6).epsilon(1e-15));
    CHECK(w_equation_residual(w0, b, hbar, x) <= 1e-15);
  }

  auto gen = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve4({-0.1, 2.1}, b, K1, 1, {1, -0.5, 0}));
  for (double x : {0.0, 0.5, 1.5, 2.0}) {
    const auto ref = oracle::rkf78(oracle::p4(b, K1, 1), 1, -0.5, 0, x);
    CHECK(std::abs(gen->value(x) - ref.y) <= 1e-9);
  }
  auto w = w_from_p4(gen, b, hbar, b1, K1);
  double worst = 0, bound = 0;
  for (double x : linspace(0, 2, 81)) {
    worst = std::max(worst, w_equation_residual(w, b, hbar, x));
    bound = std::max(bound, gen->ode_residual(x));
  }
  CHECK(worst <= 1e-6);
  CHECK(worst <= 10 * std::max(bound, 1e-12) + 1e-12);

  auto wrong = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve4({0, 2}, -4, K1, 1, {1, -0.5, 0}));
  CHECK_THROWS_AS(w_from_p4(wrong, b, hbar, b1, K1), PreconditionError);
}

TEST_CASE("linear P4 gives the one-to-three oscillator") {
  const double a = 1.0;
  catalog::InstantiateOptions o;
  o.ic = specfun::PainleveIC{1, -1.0 / 3, -1.0 / 3};
  auto inst = catalog::instantiate("Q.18", {{"a", a}, {"K1", 0}, {"K2", -1.0 / 18}}, o);
  const double c0 = inst.potential.v1.value(1.0) - a / 9;
  for (double x : linspace(0.5, 1.5, 11)) CHECK(inst.potential.v1.value(x) - a * x * x / 9 == doctest::Approx(c0).epsilon(1e-12));
}

TEST_CASE("Y built from P2") {
  auto zero = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve2({0.4, 2.1}, 0, {1, 0, 0}));
  auto y0 = y_from_p2(zero, -0.25);
  for (double xi : linspace(0.5, 2, 11)) {
    CHECK(y0.value(xi) == -xi);
    CHECK(y_equation_residual(y0, -0.25, xi) == 0.0);
  }

  auto rat = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve2({0.4, 2.1}, 1, {1, -1, 1}));
  auto yr = y_from_p2(rat, -0.75);
  for (double xi : linspace(0.6, 1.9, 11)) {
    CHECK(yr.value(xi) == doctest::Approx(-(4 / (3 * xi * xi) + xi / 3)).epsilon(1e-12));
    CHECK(y_equation_residual(yr, -0.75, xi) <= 1e-10);
  }

  auto gen = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve2({-0.1, 1.1}, -2.5, {0, 0.5, 1}));
  auto yg = y_from_p2(gen, 1.0);
  for (double xi : linspace(0, 1, 41)) CHECK(y_equation_residual(yg, 1.0, xi) <= 1e-6);

  // a P2 built for another beta leaves a residual
  auto off = std::make_shared<const specfun::SpecFunSolution>(specfun::painleve2({-0.1, 1.1}, 0.0, {0, 0.5, 1}));
  CHECK_THROWS_AS(y_from_p2(off, 1.0), PreconditionError);
  auto ym = y_formula(off, 1.0);
  double worst = 0;
  for (double xi : linspace(0.1, 0.9, 9)) worst = std::max(worst, y_equation_residual(ym, 1.0, xi));
  CHECK(worst > 1e-2);
}

TEST_CASE("case ii quantum potentials") {
  const double a = 0.7, b = 1.3, hbar = 0.9;
  CaseIIRoute zr;
  auto v = v_case_ii_quantum(a, b, hbar, zr, {-1, 1});
  for (double x : {-0.9, 0.2, 0.8})
    for (double y : {-1.0, 2.0}) CHECK(v.value(x, y) == doctest::Approx(b * x + a * y).epsilon(1e-15));

  CaseIIRoute k0{CaseIIRoute::Kind::kappa, 0.0, {0, 0, 0}};
  auto v0 = v_case_ii_quantum(a, b, hbar, k0, {-1, 1});
  CHECK(v0.value(0.3, 1.5) == doctest::Approx(a * 1.5).epsilon(1e-15));

  // P2 = -1/z solves the kappa = 1 equation, and P2' + P2^2 = 2/z^2 gives hbar^2/x^2
  const double s = -std::cbrt(4 * b / (hbar * hbar));
  const double z0 = s * 1.0;
  CaseIIRoute k1{CaseIIRoute::Kind::kappa, 1.0, {z0, -1 / z0, 1 / (z0 * z0)}};
  auto v1 = v_case_ii_quantum(a, b, hbar, k1, {0.5, 1.5});
  for (double x : {0.6, 1.0, 1.4})
    CHECK(v1.value(x, 0.5) == doctest::Approx(a * 0.5 + hbar * hbar / (x * x)).epsilon(1e-11));

  auto inst = catalog::instantiate("Q.21", {{"a", 1}, {"b", 1}, {"hbar", 1}, {"kappa", 1}});
  detsolve::GridSpec g;
  g.x = inst.domain.x;
  g.y = inst.domain.y;
  const auto r = detsolve::residual_determining(inst.potential, inst.integrals[0], g, detsolve::kSpecialFunctionTolerance);
  CHECK(r.pass);

  CHECK_THROWS_AS(v_case_ii_quantum(a, b, 0.0, zr, {-1, 1}), PreconditionError);
}

TEST_CASE("branch potentials carry implicit derivatives") {
  const RelationParams p{1, 0, 1, 1};
  const auto seed = scan_roots(Relation::case_i, p, 0.5, {-10, 10});
  const auto t = trace_maximal(Relation::case_i, p, {0.5, seed.front()}, {0.0, 1.5}, 0.01);
  CHECK(t.x.front() < 0.3);
  CHECK(t.x.back() > 1.1);
  const auto pot = branch_potential(t, "branch");
  const double h = 1e-4;
  for (double x : {0.4, 0.7, 1.0}) {
    const auto s = pot(x), sp = pot(x + h), sm = pot(x - h);
    CHECK(std::abs(relation_residual(Relation::case_i, p, x, s[0])) <= 1e-12);
    for (std::size_t n = 1; n <= 3; ++n)
      CHECK(std::abs((sp[n - 1] - sm[n - 1]) / (2 * h) - s[n]) <= 1e-5 * std::max(1.0, std::abs(s[n])));
  }
}
