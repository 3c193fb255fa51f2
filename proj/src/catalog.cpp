#include "sepint/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "sepint/implicit.hpp"
#include "sepint/specfun.hpp"

namespace sepint::catalog {

namespace {

using D = Dual2;
using specfun::PainleveIC;
using specfun::SpecFunSolution;

template <class T>
T sq(const T& v) {
  return v * v;
}

ParamSpec P(std::string name, double def, Constraint c, std::string doc) {
  return ParamSpec{std::move(name), def, c, std::move(doc)};
}

ParamSpec hbar_spec(bool positive = false) {
  return P("hbar", 1.0, positive ? Constraint::positive : Constraint::nonnegative, "Planck constant");
}

ThirdOrderIntegral make(CoeffTensor A, Field2D g1, Field2D g2, const SeparablePotential& pot) {
  ThirdOrderIntegral t;
  t.coeffs = A;
  t.corrections.g1 = std::move(g1);
  t.corrections.g2 = std::move(g2);
  t.corrections.singular_x = pot.v1.singularities();
  t.corrections.singular_y = pot.v2.singularities();
  return t;
}

ThirdOrderIntegral make_bare(CoeffTensor A) {
  ThirdOrderIntegral t;
  t.coeffs = A;
  t.corrections = zero_corrections();
  return t;
}

IntegralEntry I(std::string label, std::string g1, std::string g2, IntegralBuilder build) {
  return IntegralEntry{std::move(label), std::move(g1), std::move(g2), std::move(build), {}};
}

IntegralEntry erratum(IntegralEntry e, std::string why) {
  e.erratum = std::move(why);
  return e;
}

StateBox states_from(const Box& b, Interval momenta = {-1.0, 1.0}) { return StateBox{b.x, b.y, momenta, momenta}; }

Interval hull(Interval a, double x) { return {std::min(a.lo, x), std::max(a.hi, x)}; }

Interval sorted(double u, double v) { return {std::min(u, v), std::max(u, v)}; }

/// Runs `make` and returns its solution if it covers `need`; a pole beyond `need` is tolerated.
std::shared_ptr<const SpecFunSolution> covering(const std::function<SpecFunSolution()>& make, Interval need,
                                                const std::string& what) {
  std::shared_ptr<const SpecFunSolution> sol;
  try {
    sol = std::make_shared<const SpecFunSolution>(make());
  } catch (const specfun::PoleCollisionError& e) {
    sol = std::make_shared<const SpecFunSolution>(e.partial());
  }
  if (!sol->covers(need.lo) || !sol->covers(need.hi)) {
    std::ostringstream msg;
    msg << what << ": solution valid on [" << sol->validity().lo << ", " << sol->validity().hi
        << "] does not cover [" << need.lo << ", " << need.hi << "]";
    throw specfun::PoleCollisionError(msg.str(), sol);
  }
  return sol;
}

/// scale * wp(t) on the working interval, integrated slightly beyond it.
Potential1D weierstrass_component(double scale, double g2, double g3, Interval need, const std::string& var) {
  if (need.lo < 0.0 && need.hi > 0.0) throw DomainError("working domain contains the Weierstrass pole at 0");
  Interval iv{need.lo - 0.25, need.hi + 0.25};
  if (need.lo >= 0.0) iv.lo = std::max(iv.lo, std::min(need.lo, 0.02));
  if (need.hi <= 0.0) iv.hi = std::min(iv.hi, std::max(need.hi, -0.02));
  auto sol = covering([&] { return specfun::weierstrass_p(iv, g2, g3); }, need, "Weierstrass P");
  auto eval = [sol, scale](double t) { return stack_from_jet(scale * specfun::scaled_jets(*sol, 1.0, t).first); };
  return Potential1D(eval, {}, "hbar^2 wp(" + var + ")", specfun::scaled_domain(*sol, 1.0));
}

/// hbar^2 omega^2 P1(omega t), with P1 from `ic` in its own variable.
Potential1D p1_component(double hbar, double omega, const PainleveIC& ic, Interval need, const std::string& var) {
  if (omega == 0.0) throw SchemaError("omega must be nonzero");
  const Interval z = sorted(omega * need.lo, omega * need.hi);
  const double pad = 0.25 * std::abs(omega);
  const Interval iv{z.lo - pad, z.hi + pad};
  auto sol = covering([&] { return specfun::painleve1(iv, ic); }, z, "P1");
  const double amp = hbar * hbar * omega * omega;
  auto eval = [sol, amp, omega](double t) {
    return stack_from_jet(amp * specfun::scaled_jets(*sol, omega, t).first);
  };
  return Potential1D(eval, {}, "hbar^2 omega^2 P1(omega " + var + ")", specfun::scaled_domain(*sol, omega));
}

Potential1D closed(std::string label, std::function<Jet<4>(const Jet<4>&)> f, std::vector<double> sing = {},
                   Interval domain = {}) {
  return Potential1D::closed_form(std::move(label), [f](const Jet<4>& x) { return f(x); }, std::move(sing),
                                  domain);
}

const PainleveIC kP1Ic{0.0, 0.0, 0.0};
const PainleveIC kP4Ic{1.0, -0.5, 0.0};
const PainleveIC kP2ZeroIc{0.0, 0.1, 0.0};
const PainleveIC kP2KappaIc{0.0, 0.0, 0.0};

// ---- integrals shared between quantum and classical entries ----

std::vector<IntegralEntry> isotropic_integrals() {
  return {
      I("L^3", "0", "0", [](const ParamSet&, const SeparablePotential&) { return make_bare({.a300 = 0.5}); }),
      I("{L, px py}", "-2a x y^2", "2a x^2 y",
        [](const ParamSet& p, const SeparablePotential& pot) {
          const double a = p.get("a");
          return make({.a111 = 1.0}, make_field([a](D x, D y) { return -2.0 * a * x * y * y; }),
                      make_field([a](D x, D y) { return 2.0 * a * x * x * y; }), pot);
        }),
      I("{L, py^2}", "-2a y^3", "2a x y^2",
        [](const ParamSet& p, const SeparablePotential& pot) {
          const double a = p.get("a");
          return make({.a102 = 1.0}, make_field([a](D, D y) { return -2.0 * a * y * y * y; }),
                      make_field([a](D x, D y) { return 2.0 * a * x * y * y; }), pot);
        }),
      I("{L, px^2}", "-2a x^2 y", "2a x^3",
        [](const ParamSet& p, const SeparablePotential& pot) {
          const double a = p.get("a");
          return make({.a120 = 1.0}, make_field([a](D x, D y) { return -2.0 * a * x * x * y; }),
                      make_field([a](D x, D) { return 2.0 * a * x * x * x; }), pot);
        }),
  };
}

/// {L, px py} integral of a(x^2 + y^2) + b/x^2 + c/y^2, with b and c read by `bc`.
IntegralEntry barrier_pair_integral(std::function<std::pair<double, double>(const ParamSet&)> bc, std::string btext,
                                  std::string ctext) {
  return I("{L, px py}", "-x y (-2" + ctext + "/y^3 + 2a y)", "x y (-2" + btext + "/x^3 + 2a x)",
           [bc](const ParamSet& p, const SeparablePotential& pot) {
             const double a = p.get("a");
             const auto [b, c] = bc(p);
             return make({.a111 = 1.0},
                         make_field([a, c](D x, D y) { return -(x * y) * (-2.0 * c / (y * y * y) + 2.0 * a * y); }),
                         make_field([a, b](D x, D y) { return (x * y) * (-2.0 * b / (x * x * x) + 2.0 * a * x); }),
                         pot);
           });
}

IntegralEntry ratio_12_integral() {
  return I("2px py^2", "-2a y^2 + 2b/y^2", "8a x y + c y", [](const ParamSet& p, const SeparablePotential& pot) {
    const double a = p.get("a"), b = p.get("b"), c = p.get("c");
    return make({.a012 = 1.0}, make_field([a, b](D, D y) { return -2.0 * a * y * y + 2.0 * b / (y * y); }),
                make_field([a, c](D x, D y) { return 8.0 * a * x * y + c * y; }), pot);
  });
}

IntegralEntry ratio_13_integral(bool with_hbar) {
  if (!with_hbar)
    return I("{L, py^2}", "(2/3) a y^3", "-6a x y^2", [](const ParamSet& p, const SeparablePotential& pot) {
      const double a = p.get("a");
      return make({.a102 = 1.0}, make_field([a](D, D y) { return (2.0 / 3.0) * a * y * y * y; }),
                  make_field([a](D x, D y) { return -6.0 * a * x * y * y; }), pot);
    });
  return I("{L, py^2}", "2a y^3/3 - hbar^2/y", "3x(-2a y^2 + hbar^2/y^2)",
           [](const ParamSet& p, const SeparablePotential& pot) {
             const double a = p.get("a"), h2 = sq(p.get("hbar"));
             return make({.a102 = 1.0}, make_field([a, h2](D, D y) { return 2.0 * a * y * y * y / 3.0 - h2 / y; }),
                         make_field([a, h2](D x, D y) { return 3.0 * x * (-2.0 * a * y * y + h2 / (y * y)); }), pot);
           });
}

/// {L, px^2} integral of case i: V = a(x^2 + y^2)-type with V1 read through its channels.
IntegralEntry case_i_integral(bool quantum) {
  const std::string g2 = quantum ? "-(1/(2a)) (hbar^2/4 V1''' + (a x^2 - 3V1) V1')" : "-(1/(2a)) (a x^2 - 3V1) V1'";
  return I("{L, px^2}", "a x^2 y - 3y V1", g2, [quantum](const ParamSet& p, const SeparablePotential& pot) {
    const double a = p.get("a");
    const double h2 = quantum ? sq(p.get("hbar")) : 0.0;
    auto g1 = make_field(pot, [a](D x, D y, const Channel& v1, const Channel&) {
      return a * x * x * y - 3.0 * y * v1(0);
    });
    auto g2f = make_field(pot, [a, h2](D x, D, const Channel& v1, const Channel&) {
      return -(0.25 * h2 * v1(3) + (a * x * x - 3.0 * v1(0)) * v1(1)) / (2.0 * a);
    });
    return make({.a120 = 1.0}, g1, g2f, pot);
  });
}

/// 2a px^3 - 2b px^2 py integral of case ii, V = a y + V1(x).
IntegralEntry case_ii_integral() {
  return I("2a px^3 - 2b px^2 py", "a (3V1 - b x)", "-2b V1", [](const ParamSet& p, const SeparablePotential& pot) {
    const double a = p.get("a"), b = p.get("b");
    auto g1 = make_field(pot, [a, b](D x, D, const Channel& v1, const Channel&) { return a * (3.0 * v1(0) - b * x); });
    auto g2 = make_field(pot, [b](D, D, const Channel& v1, const Channel&) { return -2.0 * b * v1(0); });
    return make({.a030 = a, .a021 = -b}, g1, g2, pot);
  });
}

/// 2 s2 px^3 - 2 s1 py^3 + 3 s2 {V1, px} - 3 s1 {V2, py}, shared by the P1 and square-root potentials.
IntegralEntry case_iii_integral(std::string label, std::function<std::pair<double, double>(const ParamSet&)> s12) {
  return I(std::move(label), "3 s2 V1", "-3 s1 V2", [s12](const ParamSet& p, const SeparablePotential& pot) {
    const auto [s1, s2] = s12(p);
    auto g1 = make_field(pot, [s2](D, D, const Channel& v1, const Channel&) { return 3.0 * s2 * v1(0); });
    auto g2 = make_field(pot, [s1](D, D, const Channel&, const Channel& v2) { return -3.0 * s1 * v2(0); });
    return make({.a030 = s2, .a003 = -s1}, g1, g2, pot);
  });
}

/// 2 p^3 + {3 V_k, p} for a one-dimensional component V_k; `y` selects the y-channel.
IntegralEntry cubic_self_integral(bool y_axis, std::string g_text) {
  return I(y_axis ? "2py^3" : "2px^3", y_axis ? "0" : g_text, y_axis ? g_text : "0",
           [y_axis](const ParamSet&, const SeparablePotential& pot) {
             if (y_axis)
               return make({.a003 = 1.0}, zero_field(),
                           make_field(pot, [](D, D, const Channel&, const Channel& v2) { return 3.0 * v2(0); }), pot);
             return make({.a030 = 1.0},
                         make_field(pot, [](D, D, const Channel& v1, const Channel&) { return 3.0 * v1(0); }),
                         zero_field(), pot);
           });
}

// ---- potentials ----

using J = Jet<4>;

SeparablePotential oscillator(double a1, double a2, double hbar = 0.0) {
  return {closed("a x^2", [a1](const J& x) { return a1 * x * x; }),
          closed("a y^2", [a2](const J& y) { return a2 * y * y; }), hbar};
}

Potential1D inverse_square(double a, double k, const std::string& var) {
  // a t^2 + k / t^2
  return closed("a " + var + "^2 + k/" + var + "^2", [a, k](const J& t) { return a * t * t + k / (t * t); }, {0.0});
}

Potential1D alpha_well(double h2, double quad, double al, const std::string& var) {
  // h2 (quad t^2 + 1/(t - alpha)^2 + 1/(t + alpha)^2)
  return closed(
      "hbar^2 (c " + var + "^2 + 1/(" + var + " - alpha)^2 + 1/(" + var + " + alpha)^2)",
      [h2, quad, al](const J& t) { return h2 * (quad * t * t + 1.0 / sq(t - al) + 1.0 / sq(t + al)); }, {-al, al});
}

std::function<bool(const ParamSet&)> always() {
  return [](const ParamSet&) { return true; };
}

LimitLink link(std::string target, std::string condition, std::string mapping,
               std::function<bool(const ParamSet&)> applies, std::function<ParamSet(const ParamSet&)> map) {
  return LimitLink{std::move(target), std::move(condition), std::move(mapping), std::move(applies), std::move(map)};
}

LimitLink same_a_link(std::string target) {
  return link(std::move(target), "hbar -> 0", "a unchanged", always(),
              [](const ParamSet& p) { return ParamSet{{"a", p.get("a")}}; });
}

/// Links of the alpha-wells: alpha = sqrt(hbar)/omega gives an oscillator, fixed alpha gives free motion.
std::vector<LimitLink> alpha_links(std::string target) {
  return {
      link(target, "omega given (alpha = sqrt(hbar)/omega), hbar -> 0", "a = omega^4/8",
           [](const ParamSet& p) { return p.has("omega") && p.get("omega") != 0.0; },
           [](const ParamSet& p) { return ParamSet{{"a", std::pow(p.get("omega"), 4) / 8.0}}; }),
      link(target, "alpha held fixed, hbar -> 0", "a = 0 (free motion)", always(),
           [](const ParamSet&) { return ParamSet{{"a", 0.0}}; }),
  };
}

Box box(double xlo, double xhi, double ylo, double yhi) { return Box{{xlo, xhi}, {ylo, yhi}}; }

const Box kUnit = box(-1.0, 1.0, -1.0, 1.0);
const Box kPositive = box(0.3, 2.3, 0.3, 2.3);
const Box kUpperHalf = box(-1.0, 1.0, 0.3, 2.3);

PotentialEntry base(std::string id, std::string label, bool quantum) {
  PotentialEntry e;
  e.id = std::move(id);
  e.table1_label = std::move(label);
  e.quantum = quantum;
  return e;
}

std::vector<PotentialEntry> build_entries() {
  std::vector<PotentialEntry> out;

  // Q.1
  {
    auto e = base("Q.1", "Va", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), hbar_spec()};
    e.potential_text = "a(x^2 + y^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      return oscillator(p.get("a"), p.get("a"), p.get("hbar"));
    };
    e.integrals = isotropic_integrals();
    e.table1_terms = {"L^3", "{L, px py}", "{L, py^2}", "{L, px^2}"};
    e.domain = kUnit;
    e.limits = {same_a_link("C.1")};
    out.push_back(e);
  }
  // Q.2
  {
    auto e = base("Q.2", "Vb", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), P("b", 1.0, Constraint::any, "x barrier"),
                P("c", 1.0, Constraint::any, "y barrier"), hbar_spec()};
    e.potential_text = "a(x^2 + y^2) + b/x^2 + c/y^2";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      return SeparablePotential{inverse_square(p.get("a"), p.get("b"), "x"),
                                inverse_square(p.get("a"), p.get("c"), "y"), p.get("hbar")};
    };
    e.integrals = {barrier_pair_integral([](const ParamSet& p) { return std::pair{p.get("b"), p.get("c")}; }, "b", "c")};
    e.table1_terms = {"{L, px py}"};
    e.domain = kPositive;
    e.limits = {link("C.2", "hbar -> 0", "a, b, c unchanged", always(), [](const ParamSet& p) {
      return ParamSet{{"a", p.get("a")}, {"b", p.get("b")}, {"c", p.get("c")}};
    })};
    out.push_back(e);
  }
  // Q.3
  {
    auto e = base("Q.3", "Vc", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), hbar_spec()};
    e.potential_text = "a(x^2 + y^2) + hbar^2/x^2 + hbar^2/y^2";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double h2 = sq(p.get("hbar"));
      return SeparablePotential{inverse_square(p.get("a"), h2, "x"), inverse_square(p.get("a"), h2, "y"),
                                p.get("hbar")};
    };
    e.integrals = {
        I("2L^3", "-hbar^2 (3x^2/y + 2y + 3y^3/x^2)", "hbar^2 (3y^2/x + 2x + 3x^3/y^2)",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double h2 = sq(p.get("hbar"));
            return make(
                {.a300 = 1.0},
                make_field([h2](D x, D y) { return -h2 * (3.0 * x * x / y + 2.0 * y + 3.0 * y * y * y / (x * x)); }),
                make_field([h2](D x, D y) { return h2 * (3.0 * y * y / x + 2.0 * x + 3.0 * x * x * x / (y * y)); }),
                pot);
          }),
        barrier_pair_integral(
            [](const ParamSet& p) {
              const double h2 = sq(p.get("hbar"));
              return std::pair{h2, h2};
            },
            "hbar^2", "hbar^2"),
    };
    e.table1_terms = {"L^3", "{L, px py}"};
    e.domain = kPositive;
    e.limits = {same_a_link("C.1")};
    out.push_back(e);
  }
  // Q.4
  {
    auto e = base("Q.4", "Vd", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), hbar_spec()};
    e.potential_text = "a(x^2 + y^2) + hbar^2/y^2";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double a = p.get("a");
      return SeparablePotential{closed("a x^2", [a](const J& x) { return a * x * x; }),
                                inverse_square(a, sq(p.get("hbar")), "y"), p.get("hbar")};
    };
    e.integrals = {
        I("2L^3", "-hbar^2 (2y + 3x^2/y)", "hbar^2 (3x^3/y^2 + 2x)",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double h2 = sq(p.get("hbar"));
            return make({.a300 = 1.0}, make_field([h2](D x, D y) { return -h2 * (2.0 * y + 3.0 * x * x / y); }),
                        make_field([h2](D x, D y) { return h2 * (3.0 * x * x * x / (y * y) + 2.0 * x); }), pot);
          }),
        I("{L, px py}", "-2(a x y^2 - hbar^2 x/y^2)", "2a x^2 y",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double a = p.get("a"), h2 = sq(p.get("hbar"));
            return make({.a111 = 1.0},
                        make_field([a, h2](D x, D y) { return -2.0 * (a * x * y * y - h2 * x / (y * y)); }),
                        make_field([a](D x, D y) { return 2.0 * a * x * x * y; }), pot);
          }),
        I("{L, py^2}", "-(2a y^3 + hbar^2/y)", "3 hbar^2 x/y^2 + 2a x y^2",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double a = p.get("a"), h2 = sq(p.get("hbar"));
            return make({.a102 = 1.0}, make_field([a, h2](D, D y) { return -(2.0 * a * y * y * y + h2 / y); }),
                        make_field([a, h2](D x, D y) { return 3.0 * h2 * x / (y * y) + 2.0 * a * x * y * y; }), pot);
          }),
    };
    e.table1_terms = {"L^3", "{L, px py}", "{L, py^2}"};
    e.domain = kUpperHalf;
    e.limits = {same_a_link("C.1")};
    out.push_back(e);
  }

  const auto alpha_schema = [] {
    return std::vector<ParamSpec>{P("alpha", 1.0, Constraint::nonzero, "position of the inverse-square wells"),
                                  hbar_spec()};
  };
  // g-fields of the alpha-well integrals, as functions of (hbar^2, alpha)
  struct AlphaFields {
    static D q5x1_g1(double h2, double al, D x, D y) {
      const double a2 = al * al;
      return 0.25 * h2 * y * (-8.0 + 3.0 * y * y / a2 - 24.0 * y * y * (x * x + a2) / (sq(x - al) * sq(x + al)));
    }
    static D q5x1_g2(double h2, double al, D x, D y, double c24) {
      const double a2 = al * al;
      return 0.25 * h2 * x *
             (8.0 - 3.0 * y * y * (sq(x * x) - 10.0 * a2 * x * x - c24 * a2 * a2) / (a2 * sq(x - al) * sq(x + al)));
    }
    static D q6x1_g1(double h2, double al, D x, D y, double s) {
      const double a2 = al * al;
      return h2 * (3.0 * y * y * y / (4.0 * a2) + s * 6.0 * y * y * y * (x * x + a2) / (sq(x - al) * sq(x + al)) -
                   3.0 * (x * x - a2) / y - 2.0 * y);
    }
    static D q6x1_g2(double h2, double al, D x, D y) {
      const double a2 = al * al;
      return 3.0 * h2 * x *
             ((x * x - 3.0 * a2) / (y * y) - (3.0 * y * y - 8.0 * a2) / (12.0 * a2) - 2.0 * y * y / (x * x - a2) +
              4.0 * y * y * (x * x + a2) / (sq(x - al) * sq(x + al)));
    }
    static D q7x1_g1(double h2, double al, D x, D y) {
      const double a2 = al * al;
      return 0.25 * h2 * y *
             (124.0 + 3.0 * (x * x + y * y) / a2 + 24.0 * (x * x - 5.0 * y * y) / (y * y - a2) -
              144.0 * x * x / (x * x - a2) + 24.0 * (3.0 * x * x - y * y) * (x * x + a2) / (sq(x - al) * sq(x + al)) +
              48.0 * (y * y - x * x) * (y * y + a2) / (sq(y - al) * sq(y + al)));
    }
    static D q7x1_g2(double h2, double al, D x, D y, bool printed) {
      const double a2 = al * al;
      const D t = printed ? x * x : y * y;
      return -0.25 * h2 * x *
             (124.0 + 3.0 * (x * x + y * y) / a2 - 24.0 * (5.0 * x * x - y * y) / (x * x - a2) -
              144.0 * t / (y * y - a2) - 24.0 * (x * x - 3.0 * y * y) * (y * y + a2) / (sq(y - al) * sq(y + al)) +
              48.0 * (x * x - y * y) * (x * x + a2) / (sq(x - al) * sq(x + al)));
    }
  };
  const auto q5x1 = [](double c24) {
    return [c24](const ParamSet& p, const SeparablePotential& pot) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      return make({.a300 = 1.0, .a102 = -3.0 * al * al},
                  make_field([h2, al](D x, D y) { return AlphaFields::q5x1_g1(h2, al, x, y); }),
                  make_field([h2, al, c24](D x, D y) { return AlphaFields::q5x1_g2(h2, al, x, y, c24); }), pot);
    };
  };
  const auto q6x1 = [](double s) {
    return [s](const ParamSet& p, const SeparablePotential& pot) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      return make({.a300 = 1.0, .a102 = -3.0 * al * al},
                  make_field([h2, al, s](D x, D y) { return AlphaFields::q6x1_g1(h2, al, x, y, s); }),
                  make_field([h2, al](D x, D y) { return AlphaFields::q6x1_g2(h2, al, x, y); }), pot);
    };
  };
  const auto q7x1 = [](bool printed) {
    return [printed](const ParamSet& p, const SeparablePotential& pot) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      return make({.a300 = 1.0, .a120 = -3.0 * al * al, .a102 = -3.0 * al * al},
                  make_field([h2, al](D x, D y) { return AlphaFields::q7x1_g1(h2, al, x, y); }),
                  make_field([h2, al, printed](D x, D y) { return AlphaFields::q7x1_g2(h2, al, x, y, printed); }), pot);
    };
  };
  const std::string q5_g1 = "(hbar^2/4) y (-8 + 3y^2/alpha^2 - 24y^2(x^2 + alpha^2)/((x - alpha)^2 (x + alpha)^2))";
  const std::string q5_g2 =
      "(hbar^2/4) x (8 - 3y^2(x^4 - 10alpha^2 x^2 - 23alpha^4)/(alpha^2 (x - alpha)^2 (x + alpha)^2))";
  const std::string q6_g1 =
      "hbar^2 (3y^3/(4alpha^2) - 6y^3(x^2 + alpha^2)/((x - alpha)^2 (x + alpha)^2) - 3(x^2 - alpha^2)/y - 2y)";
  const std::string q6_g2 =
      "3hbar^2 x ((x^2 - 3alpha^2)/y^2 - (3y^2 - 8alpha^2)/(12alpha^2) - 2y^2/(x^2 - alpha^2) + 4y^2(x^2 + "
      "alpha^2)/((x - alpha)^2 (x + alpha)^2))";
  const std::string q7_g1 =
      "(hbar^2/4) y (124 + 3(x^2 + y^2)/alpha^2 + 24(x^2 - 5y^2)/(y^2 - alpha^2) - 144x^2/(x^2 - alpha^2) + 24(3x^2 "
      "- y^2)(x^2 + alpha^2)/((x - alpha)^2 (x + alpha)^2) + 48(y^2 - x^2)(y^2 + alpha^2)/((y - alpha)^2 (y + "
      "alpha)^2))";
  const auto q7_g2 = [](const std::string& t) {
    return "-(hbar^2/4) x (124 + 3(x^2 + y^2)/alpha^2 - 24(5x^2 - y^2)/(x^2 - alpha^2) - 144" + t +
           "/(y^2 - alpha^2) - 24(x^2 - 3y^2)(y^2 + alpha^2)/((y - alpha)^2 (y + alpha)^2) + 48(x^2 - y^2)(x^2 + "
           "alpha^2)/((x - alpha)^2 (x + alpha)^2))";
  };

  // Q.5
  {
    auto e = base("Q.5", "Ve", true);
    e.schema = alpha_schema();
    e.potential_text = "hbar^2 ((x^2 + y^2)/(8alpha^4) + 1/(x - alpha)^2 + 1/(x + alpha)^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      const double q = 1.0 / (8.0 * sq(sq(al)));
      return SeparablePotential{alpha_well(h2, q, al, "x"),
                                closed("hbar^2 y^2/(8alpha^4)", [h2, q](const J& y) { return h2 * q * y * y; }),
                                p.get("hbar")};
    };
    e.integrals = {
        I("2L^3 - 3alpha^2{L, py^2}", q5_g1, q5_g2, q5x1(23.0)),
        I("{L, px^2}", "hbar^2 y ((4alpha^2 - x^2)/(4alpha^4) - 6(x^2 + alpha^2)/(x^2 - alpha^2)^2)",
          "hbar^2 (x(x^2 - 4alpha^2)/(4alpha^4) - 2x/(x^2 - alpha^2) + 4x(x^2 + alpha^2)/((x - alpha)^2 (x + "
          "alpha)^2))",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double h2 = sq(p.get("hbar")), al = p.get("alpha"), a2 = al * al;
            return make({.a120 = 1.0}, make_field([h2, a2](D x, D y) {
                          return h2 * y *
                                 ((4.0 * a2 - x * x) / (4.0 * a2 * a2) - 6.0 * (x * x + a2) / sq(x * x - a2));
                        }),
                        make_field([h2, a2, al](D x, D) {
                          return h2 * (x * (x * x - 4.0 * a2) / (4.0 * a2 * a2) - 2.0 * x / (x * x - a2) +
                                       4.0 * x * (x * x + a2) / (sq(x - al) * sq(x + al)));
                        }),
                        pot);
          }),
    };
    e.printed_variants = {erratum(I("2L^3 - 3alpha^2{L, py^2}", q5_g1, "as g2 with -24alpha^4", q5x1(24.0)),
                                  "the -24alpha^4 term of g2 must be -23alpha^4 for the determining equations")};
    e.table1_terms = {"2L^3 - 3alpha^2{L, py^2}", "{L, px^2}"};
    e.domain = box(1.3, 3.3, -1.0, 1.0);
    e.limits = alpha_links("C.1");
    out.push_back(e);
  }
  // Q.6
  {
    auto e = base("Q.6", "Vf", true);
    e.schema = alpha_schema();
    e.potential_text = "hbar^2 ((x^2 + y^2)/(8alpha^4) + 1/y^2 + 1/(x + alpha)^2 + 1/(x - alpha)^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      const double q = 1.0 / (8.0 * sq(sq(al)));
      return SeparablePotential{
          alpha_well(h2, q, al, "x"),
          closed("hbar^2 (y^2/(8alpha^4) + 1/y^2)", [h2, q](const J& y) { return h2 * (q * y * y + 1.0 / (y * y)); },
                 {0.0}),
          p.get("hbar")};
    };
    e.integrals = {I("2L^3 - 3alpha^2{L, py^2}", q6_g1, q6_g2, q6x1(-1.0))};
    e.printed_variants = {
        erratum(I("2L^3 - 3alpha^2{L, py^2}", "as g1 with +6y^3(x^2 + alpha^2)/(...)", q6_g2, q6x1(1.0)),
                "the 6y^3(x^2 + alpha^2)/((x - alpha)^2 (x + alpha)^2) term of g1 must carry a minus sign")};
    e.table1_terms = {"2L^3 - 3alpha^2{L, py^2}"};
    e.domain = kPositive;
    e.domain.x = {1.3, 3.3};
    e.limits = alpha_links("C.1");
    out.push_back(e);
  }
  // Q.7
  {
    auto e = base("Q.7", "Vg", true);
    e.schema = alpha_schema();
    e.potential_text =
        "hbar^2 ((x^2 + y^2)/(8alpha^4) + 1/(y - alpha)^2 + 1/(x - alpha)^2 + 1/(y + alpha)^2 + 1/(x + alpha)^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      const double q = 1.0 / (8.0 * sq(sq(al)));
      return SeparablePotential{alpha_well(h2, q, al, "x"), alpha_well(h2, q, al, "y"), p.get("hbar")};
    };
    e.integrals = {I("2L^3 - 3alpha^2({L, px^2} + {L, py^2})", q7_g1, q7_g2("y^2"), q7x1(false))};
    e.printed_variants = {erratum(I("2L^3 - 3alpha^2({L, px^2} + {L, py^2})", q7_g1, q7_g2("x^2"), q7x1(true)),
                                  "the -144x^2/(y^2 - alpha^2) term of g2 must read -144y^2/(y^2 - alpha^2)")};
    e.table1_terms = {"2L^3 - 3alpha^2({L, px^2} + {L, py^2})"};
    e.domain = box(1.3, 3.3, 1.3, 3.3);
    e.limits = alpha_links("C.1");
    out.push_back(e);
  }

  const auto ratio12_potential = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
    const double a = p.get("a"), b = p.get("b"), c = p.get("c");
    return SeparablePotential{closed("4a x^2 + c x", [a, c](const J& x) { return 4.0 * a * x * x + c * x; }),
                              inverse_square(a, b, "y"), p.has("hbar") ? p.get("hbar") : 0.0};
  };
  // Q.8
  {
    auto e = base("Q.8", "Vh", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), P("b", 1.0, Constraint::any, "y barrier"),
                P("c", 1.0, Constraint::any, "linear term in x"), hbar_spec()};
    e.potential_text = "a(4x^2 + y^2) + b/y^2 + c x";
    e.build = ratio12_potential;
    e.integrals = {ratio_12_integral()};
    e.table1_terms = {"px py^2"};
    e.domain = kUpperHalf;
    e.limits = {link("C.3", "hbar -> 0", "a, b, c unchanged", always(), [](const ParamSet& p) {
      return ParamSet{{"a", p.get("a")}, {"b", p.get("b")}, {"c", p.get("c")}};
    })};
    out.push_back(e);
  }
  const auto ratio13_potential = [](double extra) {
    return [extra](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double a = p.get("a");
      const double k = extra * (p.has("hbar") ? sq(p.get("hbar")) : 0.0);
      Potential1D v2 = extra == 0.0 ? closed("a y^2", [a](const J& y) { return a * y * y; })
                                    : inverse_square(a, k, "y");
      return SeparablePotential{closed("9a x^2", [a](const J& x) { return 9.0 * a * x * x; }), v2,
                                p.has("hbar") ? p.get("hbar") : 0.0};
    };
  };
  // Q.9
  {
    auto e = base("Q.9", "Vi", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), hbar_spec()};
    e.potential_text = "a(9x^2 + y^2)";
    e.build = ratio13_potential(0.0);
    e.integrals = {ratio_13_integral(false)};
    e.table1_terms = {"{L, py^2}"};
    e.domain = kUnit;
    e.limits = {same_a_link("C.4")};
    out.push_back(e);
  }
  // Q.10
  {
    auto e = base("Q.10", "Vj", true);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), hbar_spec()};
    e.potential_text = "a(9x^2 + y^2) + hbar^2/y^2";
    e.build = ratio13_potential(1.0);
    e.integrals = {ratio_13_integral(true)};
    e.table1_terms = {"{L, py^2}"};
    e.domain = kUpperHalf;
    e.limits = {same_a_link("C.4")};
    out.push_back(e);
  }
  // Q.11
  {
    auto e = base("Q.11", "Vk", true);
    e.schema = alpha_schema();
    e.potential_text = "hbar^2 ((9x^2 + y^2)/(8alpha^4) + 1/(y + alpha)^2 + 1/(y - alpha)^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double h2 = sq(p.get("hbar")), al = p.get("alpha");
      const double q = 1.0 / (8.0 * sq(sq(al)));
      return SeparablePotential{closed("9hbar^2 x^2/(8alpha^4)", [h2, q](const J& x) { return 9.0 * h2 * q * x * x; }),
                                alpha_well(h2, q, al, "y"), p.get("hbar")};
    };
    e.integrals = {I(
        "{L, py^2}", "hbar^2 y (y^2/(12alpha^4) - 8alpha^2/(y^2 - alpha^2)^2 - 2/(y^2 - alpha^2))",
        "(3hbar^2/4) x (8(y^2 + alpha^2)/(y^2 - alpha^2)^2 - y^2/alpha^4)",
        [](const ParamSet& p, const SeparablePotential& pot) {
          const double h2 = sq(p.get("hbar")), a2 = sq(p.get("alpha"));
          return make({.a102 = 1.0}, make_field([h2, a2](D, D y) {
                        return h2 * y *
                               (y * y / (12.0 * a2 * a2) - 8.0 * a2 / sq(y * y - a2) - 2.0 / (y * y - a2));
                      }),
                      make_field([h2, a2](D x, D y) {
                        return 0.75 * h2 * x * (8.0 * (y * y + a2) / sq(y * y - a2) - y * y / (a2 * a2));
                      }),
                      pot);
        })};
    e.table1_terms = {"{L, py^2}"};
    e.domain = box(-1.0, 1.0, 1.3, 3.3);
    e.limits = alpha_links("C.4");
    out.push_back(e);
  }

  const auto q12_x1 = [](bool printed) {
    return [printed](const ParamSet& p, const SeparablePotential& pot) {
      const double h2 = sq(p.get("hbar"));
      const double a = p.has("a") ? p.get("a") : h2;
      return make({.a210 = 1.0}, make_field([h2, a](D x, D y) {
                    return 3.0 * h2 * y * y / (x * x) + 2.0 * a * x * x / (y * y) + 0.5 * h2;
                  }),
                  make_field([h2, printed](D x, D y) {
                    return printed ? -2.0 * h2 * y * y / (x * x) : -2.0 * h2 * y / x;
                  }),
                  pot);
    };
  };
  const auto q12_x2 = [](const ParamSet& p, const SeparablePotential& pot) {
    const double h2 = sq(p.get("hbar"));
    const double a = p.has("a") ? p.get("a") : h2;
    return make({.a111 = 1.0}, make_field([a](D x, D y) { return 2.0 * a * x / (y * y); }),
                make_field([h2](D x, D y) { return -2.0 * h2 * y / (x * x); }), pot);
  };
  const auto x_cube = I("2px^3", "3hbar^2/x^2", "0", [](const ParamSet& p, const SeparablePotential& pot) {
    const double h2 = sq(p.get("hbar"));
    return make({.a030 = 1.0}, make_field([h2](D x, D) { return 3.0 * h2 / (x * x); }), zero_field(), pot);
  });
  const auto y_cube = I("2py^3", "0", "3hbar^2/y^2", [](const ParamSet& p, const SeparablePotential& pot) {
    const double h2 = sq(p.get("hbar"));
    return make({.a003 = 1.0}, zero_field(), make_field([h2](D, D y) { return 3.0 * h2 / (y * y); }), pot);
  });
  const auto pure_inverse = [](double h2, double k) {
    return std::pair{closed("hbar^2/x^2", [h2](const J& x) { return h2 / (x * x); }, {0.0}),
                     closed("k/y^2", [k](const J& y) { return k / (y * y); }, {0.0})};
  };
  // Q.12
  {
    auto e = base("Q.12", "Vl", true);
    e.schema = {P("a", 1.0, Constraint::any, "y barrier"), hbar_spec()};
    e.potential_text = "hbar^2/x^2 + a/y^2";
    e.build = [pure_inverse](const ParamSet& p, const InstantiateOptions&, const Box&) {
      auto [v1, v2] = pure_inverse(sq(p.get("hbar")), p.get("a"));
      return SeparablePotential{v1, v2, p.get("hbar")};
    };
    e.integrals = {I("{L^2, px}", "3hbar^2 y^2/x^2 + 2a x^2/y^2 + hbar^2/2", "-2hbar^2 y/x", q12_x1(false)),
                   I("{L, px py}", "2a x/y^2", "-2hbar^2 y/x^2", q12_x2), x_cube};
    e.printed_variants = {
        erratum(I("{L^2, px}", "3hbar^2 y^2/x^2 + 2a x^2/y^2 + hbar^2/2", "-2hbar^2 y^2/x^2", q12_x1(true)),
                "the {y^2/x^2, py} term fails the determining equations; {y/x, py} satisfies them")};
    e.table1_terms = {"{L^2, px}", "{L, px py}", "px^3"};
    e.domain = kPositive;
    e.limits = {link("C.2", "hbar -> 0", "a -> 0, b -> 0, c = a", always(), [](const ParamSet& p) {
      return ParamSet{{"a", 0.0}, {"b", 0.0}, {"c", p.get("a")}};
    })};
    out.push_back(e);
  }
  // Q.13
  {
    auto e = base("Q.13", "Vm", true);
    e.schema = {hbar_spec()};
    e.potential_text = "hbar^2/x^2 + hbar^2/y^2";
    e.build = [pure_inverse](const ParamSet& p, const InstantiateOptions&, const Box&) {
      auto [v1, v2] = pure_inverse(sq(p.get("hbar")), sq(p.get("hbar")));
      return SeparablePotential{v1, v2, p.get("hbar")};
    };
    const auto x3 = [](bool printed) {
      return [printed](const ParamSet& p, const SeparablePotential& pot) {
        const double h2 = sq(p.get("hbar"));
        const auto rest = [h2](D x, D y) { return 3.0 * h2 * x * x / (y * y) + 2.0 * h2 * y * y / (x * x) + 0.5 * h2; };
        if (printed)
          return make({.a201 = 1.0}, make_field([h2, rest](D x, D y) { return -2.0 * h2 * x / y + rest(x, y); }),
                      zero_field(), pot);
        return make({.a201 = 1.0}, make_field([h2](D x, D y) { return -2.0 * h2 * x / y; }), make_field(rest), pot);
      };
    };
    e.integrals = {
        I("2L^3", "-hbar^2 (2y + 3x^2/y + 3y^3/x^2)", "hbar^2 (2x + 3y^2/x + 3x^3/y^2)",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double h2 = sq(p.get("hbar"));
            return make(
                {.a300 = 1.0},
                make_field([h2](D x, D y) { return -h2 * (2.0 * y + 3.0 * x * x / y + 3.0 * y * y * y / (x * x)); }),
                make_field([h2](D x, D y) { return h2 * (2.0 * x + 3.0 * y * y / x + 3.0 * x * x * x / (y * y)); }),
                pot);
          }),
        I("{L^2, px}", "3hbar^2 y^2/x^2 + 2hbar^2 x^2/y^2 + hbar^2/2", "-2hbar^2 y/x", q12_x1(false)),
        I("{L^2, py}", "-2hbar^2 x/y", "3hbar^2 x^2/y^2 + 2hbar^2 y^2/x^2 + hbar^2/2", x3(false)),
        I("{L, px py}", "2hbar^2 x/y^2", "-2hbar^2 y/x^2", q12_x2),
        x_cube,
        y_cube,
    };
    e.printed_variants = {erratum(I("{L^2, py}", "-2hbar^2 x/y + 3hbar^2 x^2/y^2 + 2hbar^2 y^2/x^2 + hbar^2/2", "0",
                                    x3(true)),
                                  "the last brace pairs with px as printed; it must pair with py")};
    e.table1_terms = {"L^3", "{L^2, px}", "{L^2, py}", "{L, px py}", "px^3", "py^3"};
    e.domain = kPositive;
    e.limits = {link("C.1", "hbar -> 0", "a = 0 (free motion)", always(),
                     [](const ParamSet&) { return ParamSet{{"a", 0.0}}; })};
    out.push_back(e);
  }
  // Q.14
  {
    auto e = base("Q.14", "Vn", true);
    e.schema = {P("a", 1.0, Constraint::any, "slope in x"), hbar_spec()};
    e.potential_text = "a x + hbar^2/y^2";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double a = p.get("a"), h2 = sq(p.get("hbar"));
      return SeparablePotential{closed("a x", [a](const J& x) { return a * x; }),
                                closed("hbar^2/y^2", [h2](const J& y) { return h2 / (y * y); }, {0.0}),
                                p.get("hbar")};
    };
    e.integrals = {
        I("{L, py^2}", "-hbar^2/y", "3hbar^2 x/y^2 - a y^2/2",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double a = p.get("a"), h2 = sq(p.get("hbar"));
            return make({.a102 = 1.0}, make_field([h2](D, D y) { return -h2 / y; }),
                        make_field([a, h2](D x, D y) { return 3.0 * h2 * x / (y * y) - 0.5 * a * y * y; }), pot);
          }),
        y_cube,
        I("2px py^2", "2hbar^2/y^2", "a y",
          [](const ParamSet& p, const SeparablePotential& pot) {
            const double a = p.get("a"), h2 = sq(p.get("hbar"));
            return make({.a012 = 1.0}, make_field([h2](D, D y) { return 2.0 * h2 / (y * y); }),
                        make_field([a](D, D y) { return a * y; }), pot);
          }),
    };
    e.table1_terms = {"{L, py^2}", "py^3", "px py^2"};
    e.domain = kUpperHalf;
    e.limits = {link("C.3", "hbar -> 0", "a -> 0, b -> 0, c = a", always(), [](const ParamSet& p) {
      return ParamSet{{"a", 0.0}, {"b", 0.0}, {"c", p.get("a")}};
    })};
    out.push_back(e);
  }
  // Q.15
  {
    auto e = base("Q.15", "Vo", true);
    e.special_function = true;
    e.schema = {hbar_spec(), P("wp_g2", 0.0, Constraint::any, "Weierstrass invariant g2"),
                P("wp_g3", 1.0, Constraint::any, "Weierstrass invariant g3")};
    e.potential_text = "hbar^2 wp(y) + V(x), V(x) free (default x^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions& o, const Box& b) {
      const double h2 = sq(p.get("hbar"));
      Potential1D v1 = o.free_component ? *o.free_component : closed("x^2", [](const J& x) { return x * x; });
      return SeparablePotential{v1, weierstrass_component(h2, p.get("wp_g2"), p.get("wp_g3"), b.y, "y"),
                                p.get("hbar")};
    };
    e.integrals = {cubic_self_integral(true, "3hbar^2 wp(y)")};
    e.table1_terms = {"py^3"};
    e.domain = kPositive;
    e.canonical_ic = "wp seeded from its Laurent series at 0; no free initial data";
    e.notes = {"Table 1 row Vo prints hbar^2/y^2 + V(x): the degenerate case wp_g2 = wp_g3 = 0 of this entry.",
               "V(x) is arbitrary; the default x^2 is a regression choice."};
    out.push_back(e);
  }
  // Q.16
  {
    auto e = base("Q.16", "", true);
    e.special_function = true;
    e.schema = {hbar_spec(), P("wp_g2", 0.0, Constraint::any, "Weierstrass invariant g2"),
                P("wp_g3", 1.0, Constraint::any, "Weierstrass invariant g3")};
    e.potential_text = "hbar^2 (wp(x) + wp(y))";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box& b) {
      const double h2 = sq(p.get("hbar"));
      return SeparablePotential{weierstrass_component(h2, p.get("wp_g2"), p.get("wp_g3"), b.x, "x"),
                                weierstrass_component(h2, p.get("wp_g2"), p.get("wp_g3"), b.y, "y"), p.get("hbar")};
    };
    e.integrals = {cubic_self_integral(false, "3hbar^2 wp(x)"), cubic_self_integral(true, "3hbar^2 wp(y)")};
    e.domain = kPositive;
    e.canonical_ic = "wp seeded from its Laurent series at 0; no free initial data";
    e.limits = {link("C.1", "hbar -> 0", "a = 0 (free motion)", always(),
                     [](const ParamSet&) { return ParamSet{{"a", 0.0}}; })};
    out.push_back(e);
  }
  // Q.17
  {
    auto e = base("Q.17", "", true);
    e.special_function = true;
    e.schema = {P("omega1", 1.0, Constraint::nonzero, "scale of the x transcendent"),
                P("omega2", 1.0, Constraint::nonzero, "scale of the y transcendent"), hbar_spec()};
    e.potential_text = "hbar^2 omega1^2 P1(omega1 x) + hbar^2 omega2^2 P1(omega2 y)";
    e.build = [](const ParamSet& p, const InstantiateOptions& o, const Box& b) {
      const PainleveIC ic = o.ic.value_or(kP1Ic);
      return SeparablePotential{p1_component(p.get("hbar"), p.get("omega1"), ic, b.x, "x"),
                                p1_component(p.get("hbar"), p.get("omega2"), ic, b.y, "y"), p.get("hbar")};
    };
    e.integrals = {case_iii_integral("2omega2^5 px^3 - 2omega1^5 py^3", [](const ParamSet& p) {
      return std::pair{std::pow(p.get("omega1"), 5), std::pow(p.get("omega2"), 5)};
    })};
    e.domain = kUnit;
    e.canonical_ic = "P1(0) = 0, P1'(0) = 0 for both components";
    e.limits = {link("C.5", "hbar -> 0 with b_i = hbar^4 omega_i^5 fixed", "beta_i = -hbar^4 omega_i^5/6", always(),
                     [](const ParamSet& p) {
                       const double h4 = sq(sq(p.get("hbar")));
                       return ParamSet{{"beta1", -h4 * std::pow(p.get("omega1"), 5) / 6.0},
                                       {"beta2", -h4 * std::pow(p.get("omega2"), 5) / 6.0}};
                     })};
    e.notes = {"The second term is P1(omega2 y); a P1(omega2 x) there would break separability."};
    out.push_back(e);
  }
  // Q.18
  {
    auto e = base("Q.18", "", true);
    e.special_function = true;
    e.requires_hbar_positive = true;
    e.schema = {P("a", 1.0, Constraint::positive, "oscillator strength"), hbar_spec(true),
                P("K1", 1.0, Constraint::any, "P4 integration constant"),
                P("K2", 1.0, Constraint::any, "P4 integration constant; 0 selects the zero branch"),
                P("b1", 0.0, Constraint::any, "signed root with b1^2 = 8a; default +sqrt(8a)")};
    e.complete = [](ParamSet& p) {
      const double r = std::sqrt(8.0 * p.get("a"));
      if (!p.has("b1") || p.get("b1") == 0.0) {
        p.set("b1", r);
      } else if (std::abs(std::abs(p.get("b1")) - r) > 1e-12 * r) {
        throw SchemaError("Q.18 needs b1 = +-sqrt(8a)");
      }
    };
    e.potential_text =
        "a(x^2 + y^2) + (hbar/2) b1 P4' + 4a P4^2 + 4a x P4 + (-hbar^2 K1 + hbar b1)/6, P4 = P4(x, -8a/hbar^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions& o, const Box& b) {
      const double a = p.get("a"), hbar = p.get("hbar"), K1 = p.get("K1"), K2 = p.get("K2"), b1 = p.get("b1");
      const double alpha = -8.0 * a / (hbar * hbar);
      const PainleveIC ic = o.ic.value_or(kP4Ic);
      const Interval iv = hull({b.x.lo - 0.25, b.x.hi + 0.25}, ic.x0);
      std::shared_ptr<const SpecFunSolution> sol;
      if (K2 == 0.0 && !o.ic)
        sol = std::make_shared<const SpecFunSolution>(specfun::painleve4_zero_branch(iv, alpha, K1));
      else
        sol = covering([&] { return specfun::painleve4(iv, alpha, K1, K2, ic); }, b.x, "P4");
      const Potential1D w = implicit::w_from_p4(sol, -8.0 * a, hbar, b1, K1);
      Potential1D v1([w, a](double x) {
        DerivStack s = w(x);
        s[0] += a * x * x / 3.0;
        s[1] += 2.0 * a * x / 3.0;
        s[2] += 2.0 * a / 3.0;
        return s;
      }, {}, "W(x) + a x^2/3", w.domain());
      return SeparablePotential{v1, closed("a y^2", [a](const J& y) { return a * y * y; }), hbar};
    };
    e.integrals = {case_i_integral(true)};
    e.domain = box(0.5, 1.5, -1.0, 1.0);
    e.canonical_ic = "P4(1) = -0.5, P4'(1) = 0; K2 = 0 selects the exact branch P4 = 0";
    e.limits = {link("C.1", "K2 = 0 (P4 = 0), hbar -> 0", "a unchanged",
                     [](const ParamSet& p) { return p.get_or("K2", 1.0) == 0.0; },
                     [](const ParamSet& p) { return ParamSet{{"a", p.get("a")}}; })};
    e.notes = {"V1 includes the a x^2 term, so the integral's V1 is the whole x-component."};
    out.push_back(e);
  }
  // Q.19
  {
    auto e = base("Q.19", "", true);
    e.special_function = true;
    e.schema = {P("a", 1.0, Constraint::nonzero, "slope in y"),
                P("omega", 1.0, Constraint::nonzero, "scale of the transcendent"), hbar_spec()};
    e.potential_text = "a y + hbar^2 omega^2 P1(omega x)";
    e.build = [](const ParamSet& p, const InstantiateOptions& o, const Box& b) {
      const double a = p.get("a");
      return SeparablePotential{p1_component(p.get("hbar"), p.get("omega"), o.ic.value_or(kP1Ic), b.x, "x"),
                                closed("a y", [a](const J& y) { return a * y; }), p.get("hbar")};
    };
    e.integrals = {I("2px^3", "3hbar^2 omega^2 P1(omega x)", "omega^5 hbar^4/(4a)",
                     [](const ParamSet& p, const SeparablePotential& pot) {
                       const double c = std::pow(p.get("omega"), 5) * sq(sq(p.get("hbar"))) / (4.0 * p.get("a"));
                       return make({.a030 = 1.0},
                                   make_field(pot, [](D, D, const Channel& v1, const Channel&) { return 3.0 * v1(0); }),
                                   make_field([c](D, D) { return D(c); }), pot);
                     })};
    e.domain = kUnit;
    e.canonical_ic = "P1(0) = 0, P1'(0) = 0";
    e.limits = {link("C.7", "hbar -> 0 with hbar^4 omega^5 fixed, omega < 0", "b = -sqrt(-hbar^4 omega^5/6)",
                     [](const ParamSet& p) { return p.get("omega") < 0.0; },
                     [](const ParamSet& p) {
                       const double h4 = sq(sq(p.get("hbar")));
                       return ParamSet{{"a", p.get("a")}, {"b", -std::sqrt(-h4 * std::pow(p.get("omega"), 5) / 6.0)}};
                     })};
    out.push_back(e);
  }
  // Q.20, Q.21
  for (bool kappa_route : {false, true}) {
    auto e = base(kappa_route ? "Q.21" : "Q.20", "", true);
    e.special_function = true;
    e.requires_hbar_positive = true;
    e.schema = {P("a", 1.0, Constraint::nonzero, "slope in y"), P("b", 1.0, Constraint::nonzero, "case ii constant"),
                hbar_spec(true)};
    if (kappa_route) e.schema.push_back(P("kappa", 1.0, Constraint::any, "P2 parameter"));
    e.potential_text = kappa_route ? "a y + (2hbar^2 b^2)^(1/3) (P2'(z, kappa) + P2(z, kappa)^2), z = -(4b/hbar^2)^(1/3) x"
                                   : "b x + a y + (2hbar b)^(2/3) P2((2b/hbar^2)^(1/3) x, 0)^2";
    e.build = [kappa_route](const ParamSet& p, const InstantiateOptions& o, const Box& b) {
      implicit::CaseIIRoute route;
      route.kind = kappa_route ? implicit::CaseIIRoute::Kind::kappa : implicit::CaseIIRoute::Kind::zero_k2;
      route.kappa = kappa_route ? p.get("kappa") : 0.0;
      route.ic = o.ic.value_or(kappa_route ? kP2KappaIc : kP2ZeroIc);
      return implicit::v_case_ii_quantum(p.get("a"), p.get("b"), p.get("hbar"), route, b.x);
    };
    e.integrals = {case_ii_integral()};
    e.domain = kUnit;
    e.canonical_ic = kappa_route ? "P2(0) = 0, P2'(0) = 0 at alpha = kappa" : "P2(0) = 0.1, P2'(0) = 0 at alpha = 0";
    if (!kappa_route)
      e.limits = {link("C.8", "hbar -> 0", "a, b unchanged, d = 0", always(), [](const ParamSet& p) {
        return ParamSet{{"a", p.get("a")}, {"b", p.get("b")}, {"d", 0.0}};
      })};
    else
      e.notes = {"The printed formula has unbalanced parentheses; read as P2'(z, kappa) + P2(z, kappa)^2 with the "
                 "derivative taken in z."};
    out.push_back(e);
  }

  // ---- classical entries ----
  // C.1
  {
    auto e = base("C.1", "Va", false);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength")};
    e.potential_text = "a(x^2 + y^2)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      return oscillator(p.get("a"), p.get("a"));
    };
    e.integrals = isotropic_integrals();
    e.table1_terms = {"L^3", "{L, px py}", "{L, py^2}", "{L, px^2}"};
    e.domain = kUnit;
    e.states = StateBox{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    out.push_back(e);
  }
  // C.2
  {
    auto e = base("C.2", "Vb", false);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), P("b", 1.0, Constraint::any, "x barrier"),
                P("c", 1.0, Constraint::any, "y barrier")};
    e.potential_text = "a(x^2 + y^2) + b/x^2 + c/y^2";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      return SeparablePotential{inverse_square(p.get("a"), p.get("b"), "x"),
                                inverse_square(p.get("a"), p.get("c"), "y"), 0.0};
    };
    e.integrals = {barrier_pair_integral([](const ParamSet& p) { return std::pair{p.get("b"), p.get("c")}; }, "b", "c")};
    e.table1_terms = {"{L, px py}"};
    e.domain = kPositive;
    e.states = StateBox{{0.5, 1.5}, {0.5, 1.5}, {-0.5, 0.5}, {-0.5, 0.5}};
    out.push_back(e);
  }
  // C.3
  {
    auto e = base("C.3", "Vh", false);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength"), P("b", 1.0, Constraint::any, "y barrier"),
                P("c", 1.0, Constraint::any, "linear term in x")};
    e.potential_text = "a(4x^2 + y^2) + b/y^2 + c x";
    e.build = ratio12_potential;
    e.integrals = {ratio_12_integral()};
    e.table1_terms = {"px py^2"};
    e.domain = kUpperHalf;
    e.states = StateBox{{-1.0, 1.0}, {0.5, 1.5}, {-0.5, 0.5}, {-0.5, 0.5}};
    out.push_back(e);
  }
  // C.4
  {
    auto e = base("C.4", "Vi", false);
    e.schema = {P("a", 1.0, Constraint::any, "oscillator strength")};
    e.potential_text = "a(9x^2 + y^2)";
    e.build = ratio13_potential(0.0);
    e.integrals = {ratio_13_integral(false)};
    e.table1_terms = {"{L, py^2}"};
    e.domain = kUnit;
    e.states = StateBox{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    out.push_back(e);
  }
  // C.5
  {
    auto e = base("C.5", "", false);
    e.schema = {P("beta1", 1.0, Constraint::nonzero, "x coefficient"), P("beta2", 1.0, Constraint::nonzero, "y coefficient"),
                P("k1", -1.0, Constraint::sign, "sign of the x component"),
                P("k2", -1.0, Constraint::sign, "sign of the y component")};
    e.potential_text = "k1 sqrt(beta1 x) + k2 sqrt(beta2 y), k1, k2 = +-1";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const auto root = [](double beta, double k, const std::string& var) {
        const Interval dom = beta > 0.0 ? Interval{0.0, std::numeric_limits<double>::infinity()}
                                        : Interval{-std::numeric_limits<double>::infinity(), 0.0};
        return closed("k sqrt(beta " + var + ")", [beta, k](const J& t) { return k * sqrt(beta * t); }, {0.0}, dom);
      };
      return SeparablePotential{root(p.get("beta1"), p.get("k1"), "x"), root(p.get("beta2"), p.get("k2"), "y"), 0.0};
    };
    e.integrals = {case_iii_integral("2beta2 px^3 - 2beta1 py^3",
                                     [](const ParamSet& p) { return std::pair{p.get("beta1"), p.get("beta2")}; })};
    e.domain = kPositive;
    e.states = StateBox{{1.0, 2.0}, {1.0, 2.0}, {0.0, 0.5}, {0.0, 0.5}};
    e.notes = {"Integrated strictly inside one quadrant; the axes are singular lines."};
    out.push_back(e);
  }
  // C.6
  {
    auto e = base("C.6", "", false);
    e.branch_built = true;
    e.schema = {P("a", 1.0, Constraint::nonzero, "oscillator strength"), P("c", 1.0, Constraint::any, "relation constant c"),
                P("d", 1.0, Constraint::any, "relation constant d")};
    e.potential_text = "a y^2 + V1(x), V1 the lower root branch of c x^2 - d^2 + 2d(V1 - a x^2)(3V1 + a x^2) = (9V1 - "
                       "a x^2)(V1 - a x^2)^3";
    e.seed_scan = [](const ParamSet& p, const Box& b) {
      const implicit::RelationParams rp{p.get("a"), 0.0, p.get("c"), p.get("d")};
      BranchSeed s;
      s.relation = implicit::to_string(implicit::Relation::case_i);
      s.x0 = 0.5 * (b.x.lo + b.x.hi);
      s.roots = implicit::scan_roots(implicit::Relation::case_i, rp, s.x0, Interval{-50.0, 50.0});
      if (s.roots.empty()) throw DomainError("C.6 relation has no real root at the seed abscissa");
      s.chosen = s.roots.front();
      s.range = Interval{std::max(b.x.lo - 0.3, s.x0 > 0.0 ? 0.0 : b.x.lo - 0.3), b.x.hi + 0.3};
      s.step = 0.005;
      return s;
    };
    e.build = [seed = e.seed_scan](const ParamSet& p, const InstantiateOptions&, const Box& b) {
      const double a = p.get("a");
      const implicit::RelationParams rp{a, 0.0, p.get("c"), p.get("d")};
      const BranchSeed s = seed(p, b);
      const auto trace = implicit::trace_maximal(implicit::Relation::case_i, rp, {s.x0, s.chosen}, s.range, s.step);
      if (trace.x.front() > b.x.lo || trace.x.back() < b.x.hi) {
        std::ostringstream msg;
        msg << "C.6 root branch only spans [" << trace.x.front() << ", " << trace.x.back() << "]";
        throw DomainError(msg.str());
      }
      return SeparablePotential{implicit::branch_potential(trace, "V1 (root branch)"),
                                closed("a y^2", [a](const J& y) { return a * y * y; }), 0.0};
    };
    e.integrals = {case_i_integral(false)};
    e.domain = box(0.3, 1.1, -1.0, 1.0);
    e.states = StateBox{{0.3, 0.45}, {-1.0, 1.0}, {-0.1, 0.1}, {-1.0, 1.0}};
    e.canonical_ic = "lowest real root at the midpoint of the working x-range, continued in both directions";
    out.push_back(e);
  }
  // C.7
  {
    auto e = base("C.7", "", false);
    e.schema = {P("a", 1.0, Constraint::nonzero, "slope in y"), P("b", -1.0, Constraint::any, "square-root strength")};
    e.potential_text = "a y + b sqrt(x)";
    e.build = [](const ParamSet& p, const InstantiateOptions&, const Box&) {
      const double a = p.get("a"), bb = p.get("b");
      return SeparablePotential{
          closed("b sqrt(x)", [bb](const J& x) { return bb * sqrt(x); }, {0.0},
                 Interval{0.0, std::numeric_limits<double>::infinity()}),
          closed("a y", [a](const J& y) { return a * y; }), 0.0};
    };
    e.integrals = {I("2px^3", "3b sqrt(x)", "-3b^2/(2a)", [](const ParamSet& p, const SeparablePotential& pot) {
      const double a = p.get("a"), bb = p.get("b");
      return make({.a030 = 1.0}, make_field([bb](D x, D) { return 3.0 * bb * sqrt(x); }),
                  make_field([a, bb](D, D) { return D(-3.0 * bb * bb / (2.0 * a)); }), pot);
    })};
    e.domain = box(0.3, 2.3, -1.0, 1.0);
    e.states = StateBox{{1.0, 2.0}, {-1.0, 1.0}, {0.0, 0.5}, {-1.0, 1.0}};
    out.push_back(e);
  }
  // C.8
  {
    auto e = base("C.8", "", false);
    e.branch_built = true;
    e.schema = {P("a", 1.0, Constraint::nonzero, "slope in y"), P("b", 1.0, Constraint::nonzero, "case ii constant"),
                P("d", 1.0, Constraint::any, "relation constant")};
    e.potential_text = "a y + V1(x), (V1 - b x)^2 V1 = d, upper root branch";
    e.seed_scan = [](const ParamSet& p, const Box& b) {
      const implicit::RelationParams rp{0.0, p.get("b"), 0.0, p.get("d")};
      BranchSeed s;
      s.relation = implicit::to_string(implicit::Relation::case_ii);
      s.x0 = 0.5 * (b.x.lo + b.x.hi);
      const double w = 10.0 + 2.0 * std::abs(rp.b * s.x0) + std::cbrt(std::abs(rp.d));
      s.roots = implicit::scan_roots(implicit::Relation::case_ii, rp, s.x0, Interval{-w, w});
      if (s.roots.empty()) throw DomainError("C.8 relation has no real root at the seed abscissa");
      s.chosen = s.roots.back();
      s.range = Interval{std::min(b.x.lo - 1.0, -300.0), std::max(b.x.hi + 1.0, 300.0)};
      s.step = 0.05;
      return s;
    };
    e.build = [seed = e.seed_scan](const ParamSet& p, const InstantiateOptions&, const Box& b) {
      const double a = p.get("a");
      const implicit::RelationParams rp{0.0, p.get("b"), 0.0, p.get("d")};
      const BranchSeed s = seed(p, b);
      const auto trace = implicit::trace_maximal(implicit::Relation::case_ii, rp, {s.x0, s.chosen}, s.range, s.step);
      if (trace.x.front() > b.x.lo || trace.x.back() < b.x.hi) {
        std::ostringstream msg;
        msg << "C.8 root branch only spans [" << trace.x.front() << ", " << trace.x.back() << "]";
        throw DomainError(msg.str());
      }
      return SeparablePotential{implicit::branch_potential(trace, "V1 (root branch)"),
                                closed("a y", [a](const J& y) { return a * y; }), 0.0};
    };
    e.integrals = {case_ii_integral()};
    e.domain = kUnit;
    e.states = StateBox{{-1.0, 1.0}, {-1.0, 1.0}, {-0.5, 0.5}, {-1.0, 1.0}};
    e.canonical_ic = "largest real root at the midpoint of the working x-range, continued over [-300, 300]";
    e.notes = {"2a px^3 - 2b px^2 py maps to A030 = a, A021 = -b."};
    out.push_back(e);
  }

  for (auto& e : out) {
    if (!std::isfinite(e.states.x.width())) e.states = states_from(e.domain);
  }
  return out;
}

bool satisfies(Constraint c, double v) {
  switch (c) {
    case Constraint::any:
      return true;
    case Constraint::nonzero:
      return v != 0.0;
    case Constraint::positive:
      return v > 0.0;
    case Constraint::nonnegative:
      return v >= 0.0;
    case Constraint::sign:
      return v == 1.0 || v == -1.0;
  }
  return false;
}

std::string constraint_text(Constraint c) {
  switch (c) {
    case Constraint::any:
      return "real";
    case Constraint::nonzero:
      return "nonzero";
    case Constraint::positive:
      return "> 0";
    case Constraint::nonnegative:
      return ">= 0";
    case Constraint::sign:
      return "+1 or -1";
  }
  return "";
}

const std::vector<std::pair<std::string, std::size_t>>& label_tokens() {
  static const std::vector<std::pair<std::string, std::size_t>> t = {
      {"{L, px py}", 4}, {"{L^2, px}", 1}, {"{L^2, py}", 2}, {"{L, px^2}", 3}, {"{L, py^2}", 5},
      {"px^2 py", 7},    {"px py^2", 8},   {"L^3", 0},       {"px^3", 6},      {"py^3", 9},
  };
  return t;
}

}  // namespace

const std::vector<PotentialEntry>& entries() {
  static const std::vector<PotentialEntry> all = build_entries();
  return all;
}

const PotentialEntry& find_entry(const std::string& id) {
  for (const auto& e : entries())
    if (e.id == id) return e;
  throw UnknownEntryError("unknown catalog entry '" + id + "'");
}

std::vector<EntrySummary> list_entries() {
  std::vector<EntrySummary> out;
  for (const auto& e : entries()) {
    EntrySummary s{e.id, e.table1_label, e.schema, e.integrals.size(), {}};
    for (const auto& i : e.integrals) s.leading_terms.push_back(i.label);
    out.push_back(std::move(s));
  }
  return out;
}

ParamSet resolve_params(const PotentialEntry& entry, const ParamSet& overrides) {
  for (const auto& [name, value] : overrides.values()) {
    (void)value;
    const bool known = std::any_of(entry.schema.begin(), entry.schema.end(),
                                   [&](const ParamSpec& s) { return s.name == name; });
    if (!known) throw SchemaError("parameter '" + name + "' is not part of entry " + entry.id);
  }
  ParamSet out;
  for (const auto& s : entry.schema) {
    const double v = overrides.has(s.name) ? overrides.get(s.name) : s.default_value;
    if (!satisfies(s.constraint, v))
      throw SchemaError("entry " + entry.id + ": parameter " + s.name + " must be " + constraint_text(s.constraint));
    out.set(s.name, v);
  }
  if (entry.requires_hbar_positive && !(out.get_or("hbar", 0.0) > 0.0))
    throw SchemaError("entry " + entry.id + " needs hbar > 0");
  if (entry.complete) entry.complete(out);
  return out;
}

Instance instantiate(const std::string& id, const ParamSet& params, const InstantiateOptions& options) {
  const PotentialEntry& e = find_entry(id);
  if (options.free_component && e.id != "Q.15")
    throw SchemaError("a free component is only accepted by Q.15");
  Instance inst;
  inst.id = e.id;
  inst.params = resolve_params(e, params);
  inst.domain = options.working_domain.value_or(e.domain);
  if (!(inst.domain.x.lo < inst.domain.x.hi) || !(inst.domain.y.lo < inst.domain.y.hi))
    throw SchemaError("working domain must have lo < hi on both axes");
  inst.potential = e.build(inst.params, options, inst.domain);
  for (const auto& ie : e.integrals) {
    ThirdOrderIntegral t = ie.build(inst.params, inst.potential);
    t.label = ie.label;
    inst.integrals.push_back(std::move(t));
  }
  return inst;
}

std::vector<ThirdOrderIntegral> instantiate_printed_variants(const Instance& instance) {
  const PotentialEntry& e = find_entry(instance.id);
  std::vector<ThirdOrderIntegral> out;
  for (const auto& ie : e.printed_variants) {
    ThirdOrderIntegral t = ie.build(instance.params, instance.potential);
    t.label = ie.label + " (as printed)";
    out.push_back(std::move(t));
  }
  return out;
}

std::pair<std::string, ParamSet> classical_limit(const std::string& id, const ParamSet& params) {
  const PotentialEntry& e = find_entry(id);
  if (e.limits.empty()) throw NoLimitError("entry " + id + " declares no classical limit");
  ParamSet merged = params;
  for (const auto& s : e.schema)
    if (!merged.has(s.name)) merged.set(s.name, s.default_value);
  if (e.complete) e.complete(merged);
  for (const auto& l : e.limits)
    if (l.applies(merged)) return {l.target, l.map(merged)};
  throw NoLimitError("no classical limit of " + id + " applies to these parameters");
}

std::vector<std::size_t> label_terms(const std::string& label) {
  std::string s = label;
  std::vector<std::size_t> out;
  for (const auto& [tok, slot] : label_tokens()) {
    for (auto pos = s.find(tok); pos != std::string::npos; pos = s.find(tok)) {
      out.push_back(slot);
      s.replace(pos, tok.size(), std::string(tok.size(), ' '));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> nonzero_terms(const CoeffTensor& A) {
  std::vector<std::size_t> out;
  const auto arr = A.as_array();
  for (std::size_t i = 0; i < arr.size(); ++i)
    if (arr[i] != 0.0) out.push_back(i);
  return out;
}

void write_reference(std::ostream& os) {
  const auto iv = [](const Interval& i) {
    std::ostringstream s;
    s << "[" << i.lo << ", " << i.hi << "]";
    return s.str();
  };
  os << "# Catalog reference\n\n"
     << "Integrals are stored in the canonical form X = sum A_ijk {L^i, px^j py^k} + {g1, px} + {g2, py},\n"
     << "with L = x py - y px and the classical reading {f, p} = 2 f p. The g-fields below are the ones\n"
     << "paired with px and py in that form.\n\n";
  for (const auto& e : entries()) {
    os << "## " << e.id;
    if (!e.table1_label.empty()) os << " (" << e.table1_label << ")";
    os << "\n\n"
       << "- regime: " << (e.quantum ? "quantum" : "classical") << "\n"
       << "- potential: `" << e.potential_text << "`\n"
       << "- default domain: x in " << iv(e.domain.x) << ", y in " << iv(e.domain.y) << "\n";
    if (!e.canonical_ic.empty()) os << "- canonical initial data: " << e.canonical_ic << "\n";
    os << "\n| parameter | default | constraint | meaning |\n|---|---|---|---|\n";
    for (const auto& s : e.schema)
      os << "| " << s.name << " | " << s.default_value << " | " << constraint_text(s.constraint) << " | " << s.doc
         << " |\n";
    os << "\nIntegrals:\n\n";
    for (std::size_t k = 0; k < e.integrals.size(); ++k) {
      const auto& i = e.integrals[k];
      os << k + 1 << ". `" << i.label << "`; g1 = `" << i.g1_text << "`; g2 = `" << i.g2_text << "`\n";
    }
    for (const auto& i : e.printed_variants)
      os << "\nAs printed (fails the determining equations): `" << i.label << "` with g1 = `" << i.g1_text
         << "`, g2 = `" << i.g2_text << "`. " << i.erratum << ".\n";
    if (!e.limits.empty()) {
      os << "\nClassical limits:\n\n";
      for (const auto& l : e.limits) os << "- " << l.condition << ": " << l.target << ", " << l.mapping << "\n";
    }
    if (!e.notes.empty()) {
      os << "\nNotes:\n\n";
      for (const auto& n : e.notes) os << "- " << n << "\n";
    }
    os << "\n";
  }
}

}  // namespace sepint::catalog
