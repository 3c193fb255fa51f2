#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "sepint/catalog.hpp"
#include "sepint/detsolve.hpp"

using namespace sepint;
using namespace sepint::catalog;

namespace {

std::size_t count_of(const std::string& id) { return find_entry(id).integrals.size(); }

detsolve::GridSpec grid_of(const Instance& inst) {
  detsolve::GridSpec g;
  g.x = inst.domain.x;
  g.y = inst.domain.y;
  return g;
}

}  // namespace

TEST_CASE("inventory") {
  const auto all = list_entries();
  CHECK(all.size() == 29);
  std::size_t quantum = 0;
  for (const auto& e : entries()) quantum += e.quantum ? 1 : 0;
  CHECK(quantum == 21);
  CHECK(count_of("Q.1") == 4);
  CHECK(count_of("Q.13") == 6);
  CHECK(count_of("Q.18") == 1);
  CHECK(count_of("C.1") == 4);
  for (const auto& e : entries()) CHECK(!e.integrals.empty());
  std::set<std::string> ids;
  for (const auto& s : all) ids.insert(s.id);
  CHECK(ids.size() == 29);
  CHECK_THROWS_AS(find_entry("Q.22"), UnknownEntryError);
}

TEST_CASE("leading-term labels match the coefficient tensors") {
  for (const auto& e : entries()) {
    auto inst = instantiate(e.id, {});
    REQUIRE(inst.integrals.size() == e.integrals.size());
    for (std::size_t k = 0; k < inst.integrals.size(); ++k) {
      INFO(e.id, " integral ", k + 1, " ", e.integrals[k].label);
      CHECK(label_terms(e.integrals[k].label) == nonzero_terms(inst.integrals[k].coeffs));
    }
    // the Table 1 row names the same leading terms
    if (!e.table1_terms.empty()) {
      REQUIRE(e.table1_terms.size() == e.integrals.size());
      for (std::size_t k = 0; k < e.integrals.size(); ++k)
        CHECK(label_terms(e.table1_terms[k]) == label_terms(e.integrals[k].label));
    }
  }
  // {L, px py} names only A111
  CHECK(label_terms("{L, px py}") == std::vector<std::size_t>{4});
}

TEST_CASE("canonical coefficients") {
  auto q2 = instantiate("Q.2", {{"a", 1}, {"b", 2}, {"c", 3}});
  bool found = false;
  for (const auto& I : q2.integrals)
    if (nonzero_terms(I.coeffs) == std::vector<std::size_t>{4}) {
      found = true;
      CHECK(I.coeffs.a111 == 1.0);
    }
  CHECK(found);

  auto q14 = instantiate("Q.14", {{"a", 1.5}, {"hbar", 0.7}});
  const auto& X3 = q14.integrals[2];
  CHECK(X3.coeffs.a012 == 1.0);
  CHECK(X3.corrections.g1(0.4, 1.3).value == doctest::Approx(2 * 0.49 / (1.3 * 1.3)).epsilon(1e-15));
  CHECK(X3.corrections.g2(0.4, 1.3).value == doctest::Approx(1.5 * 1.3).epsilon(1e-15));
}

TEST_CASE("every listed integral satisfies the determining equations") {
  for (const auto& e : entries()) {
    auto inst = instantiate(e.id, {});
    const double tol = e.special_function ? detsolve::kSpecialFunctionTolerance : detsolve::kClosedFormTolerance;
    for (const auto& I : inst.integrals) {
      const auto r = detsolve::residual_determining(inst.potential, I, grid_of(inst), tol);
      INFO(e.id, " ", I.label, " max ", r.max_abs());
      CHECK(r.pass);
      // the linear compatibility condition follows
      const auto lc = detsolve::residual_linear_compat(inst.potential, I.coeffs, grid_of(inst), tol);
      CHECK(lc.pass);
    }
  }
}

TEST_CASE("printed variants with misprints fail the determining equations") {
  std::set<std::string> with_variants;
  for (const auto& e : entries()) {
    if (e.printed_variants.empty()) continue;
    with_variants.insert(e.id);
    auto inst = instantiate(e.id, {});
    for (const auto& I : instantiate_printed_variants(inst)) {
      const auto r = detsolve::residual_determining(inst.potential, I, grid_of(inst));
      INFO(e.id, " ", I.label);
      CHECK(!r.pass);
      CHECK(r.max_abs() > 1e-3);
    }
  }
  CHECK(with_variants == std::set<std::string>{"Q.5", "Q.6", "Q.7", "Q.12", "Q.13"});
}

TEST_CASE("schema checks") {
  CHECK_THROWS_AS(instantiate("Q.5", {{"alpha", 0.0}}), SchemaError);
  CHECK_THROWS_AS(instantiate("Q.1", {{"K1", 1.0}}), SchemaError);
  CHECK_THROWS_AS(instantiate("Q.18", {{"hbar", 0.0}}), SchemaError);
  CHECK_THROWS_AS(instantiate("Q.18", {{"a", 1.0}, {"b1", 2.0}}), SchemaError);
  CHECK_THROWS_AS(instantiate("NOPE", {}), UnknownEntryError);
  auto p = resolve_params(find_entry("Q.18"), {});
  CHECK(p.get("b1") == doctest::Approx(std::sqrt(8.0)));
  auto q = resolve_params(find_entry("Q.18"), {{"b1", -std::sqrt(8.0)}});
  CHECK(q.get("b1") < 0);
}

TEST_CASE("classical limits") {
  auto [t3, p3] = classical_limit("Q.3", {{"a", 2.5}});
  CHECK(t3 == "C.1");
  CHECK(p3.get("a") == 2.5);

  auto [t5, p5] = classical_limit("Q.5", {{"omega", 2.0}});
  CHECK(t5 == "C.1");
  CHECK(p5.get("a") == doctest::Approx(2.0));

  auto [tf, pf] = classical_limit("Q.5", {});
  CHECK(tf == "C.1");
  CHECK(pf.get("a") == 0.0);

  for (const auto& e : entries())
    if (!e.quantum) CHECK_THROWS_AS(classical_limit(e.id, {}), NoLimitError);
}

TEST_CASE("oscillator limit of the alpha wells approaches the mapped potential") {
  // with alpha = sqrt(hbar)/omega the quadratic part stays omega^4/8 (x^2 + y^2) and the wells vanish
  const double omega = 1.0;
  double previous = 1e9;
  for (double hbar : {1e-2, 1e-4, 1e-6}) {
    const double alpha = std::sqrt(hbar) / omega;
    InstantiateOptions o;
    o.working_domain = Box{{1.0, 2.0}, {-1.0, 1.0}};
    auto inst = instantiate("Q.5", {{"alpha", alpha}, {"hbar", hbar}}, o);
    auto target = instantiate("C.1", {{"a", std::pow(omega, 4) / 8}});
    const double gap = std::abs(inst.potential.value(1.5, 0.5) - target.potential.value(1.5, 0.5));
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-10);
}

TEST_CASE("zero branch of the P4 entry is the isotropic oscillator") {
  const double a = 0.75, hbar = 1.3, K1 = 0.4;
  auto inst = instantiate("Q.18", {{"a", a}, {"hbar", hbar}, {"K1", K1}, {"K2", 0.0}});
  const double b1 = std::sqrt(8 * a);
  const double c = (-hbar * hbar * K1 + hbar * b1) / 6;
  for (double x : {0.6, 1.0, 1.4})
    for (double y : {-0.8, 0.0, 0.9}) {
      const double want = a * (x * x + y * y) + c;
      CHECK(std::abs(inst.potential.value(x, y) - want) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(want));
    }
}

TEST_CASE("pure hbar^2 entries scale with hbar^2") {
  const std::vector<std::string> ids{"Q.3", "Q.5", "Q.6", "Q.7", "Q.11", "Q.12", "Q.13", "Q.16"};
  for (const auto& id : ids) {
    for (double hbar : {0.3, 2.0}) {
      ParamSet ph{{"hbar", hbar}}, p1{{"hbar", 1.0}};
      if (id == "Q.3") {
        // its oscillator term a(x^2 + y^2) is not hbar^2-proportional; a = 0 isolates the hbar^2 part
        ph.set("a", 0.0);
        p1.set("a", 0.0);
      }
      if (id == "Q.12") {
        ph.set("a", hbar * hbar);
        p1.set("a", 1.0);
      }
      auto vh = instantiate(id, ph), v1 = instantiate(id, p1);
      for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
          const double x = vh.domain.x.lo + vh.domain.x.width() * i / 5.0;
          const double y = vh.domain.y.lo + vh.domain.y.width() * j / 5.0;
          const double lhs = vh.potential.value(x, y), rhs = hbar * hbar * v1.potential.value(x, y);
          INFO(id, " hbar ", hbar, " at ", x, ", ", y);
          CHECK(std::abs(lhs - rhs) <= 8 * std::numeric_limits<double>::epsilon() * std::abs(rhs));
        }
    }
  }
}

TEST_CASE("free component of the Weierstrass entry") {
  InstantiateOptions o;
  o.free_component = Potential1D::closed_form("x^4", [](auto x) { return x * x * x * x; });
  auto inst = instantiate("Q.15", {}, o);
  CHECK(inst.potential.v1.value(1.5) == doctest::Approx(5.0625));
  const auto r = detsolve::residual_determining(inst.potential, inst.integrals[0], grid_of(inst),
                                                detsolve::kSpecialFunctionTolerance);
  CHECK(r.pass);
  CHECK_THROWS_AS(instantiate("Q.1", {}, o), SchemaError);
}

TEST_CASE("branch-built entries expose their seed") {
  for (const char* id : {"C.6", "C.8"}) {
    const auto& e = find_entry(id);
    REQUIRE(e.branch_built);
    REQUIRE(e.seed_scan);
    auto p = resolve_params(e, {});
    const auto s = e.seed_scan(p, e.domain);
    CHECK(!s.roots.empty());
    CHECK(std::find(s.roots.begin(), s.roots.end(), s.chosen) != s.roots.end());
    CHECK(s.step > 0);
  }
}

TEST_CASE("reference document has one section per entry") {
  std::ostringstream os;
  write_reference(os);
  const std::string doc = os.str();
  for (const auto& e : entries()) CHECK(doc.find("## " + e.id) != std::string::npos);
  CHECK(doc.find("P1(omega2 y)") != std::string::npos);
}
