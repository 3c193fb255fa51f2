#include "sepint/implicit.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <ostream>
#include <sstream>

namespace sepint::implicit {

namespace {

struct LocalDerivs {
  double f = 0.0;
  double fx = 0.0;
  double fv = 0.0;
};

LocalDerivs local(Relation rel, const RelationParams& p, double x, double V) {
  const Dual2 r = relation_value(rel, p, Dual2::x_variable(x), Dual2::y_variable(V));
  return {r.v, r.dx, r.dy};
}

// The implicit derivative dV/dx = -F_x / F_V is unusable when F_V is negligible on the term scale.
bool is_turning(Relation rel, const RelationParams& p, double x, double V, const LocalDerivs& l) {
  return std::abs(l.fv) * (1.0 + std::abs(V)) <= 1e-9 * relation_scale(rel, p, x, V);
}

// Newton in V at fixed x; returns false if it fails to converge.
bool newton_at(Relation rel, const RelationParams& p, double x, double& V) {
  for (int it = 0; it < 50; ++it) {
    const LocalDerivs l = local(rel, p, x, V);
    if (l.f == 0.0) return true;
    if (l.fv == 0.0) return false;
    const double step = l.f / l.fv;
    V -= step;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(V))) return relation_residual(rel, p, x, V) <= 1e-10;
  }
  return relation_residual(rel, p, x, V) <= 1e-12;
}

// Multiplicity-robust iteration V <- V - F F' / (F'^2 - F F'').
double schroeder_polish(Relation rel, const RelationParams& p, double x, double V) {
  for (int it = 0; it < 100; ++it) {
    const Jet<2> J = relation_value(rel, p, Jet<2>(x), Jet<2>::variable(V));
    const double f = J[0], f1 = J[1], f2 = 2.0 * J[2];
    if (f == 0.0) break;
    const double denom = f1 * f1 - f * f2;
    if (denom == 0.0) break;
    const double step = f * f1 / denom;
    if (!std::isfinite(step)) break;
    V -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(V))) break;
  }
  return V;
}

std::string describe(Relation rel, double x, double V) {
  std::ostringstream msg;
  msg << to_string(rel) << " branch at (x, V1) = (" << x << ", " << V << ")";
  return msg.str();
}

}  // namespace

std::string to_string(Relation r) { return r == Relation::case_i ? "eq24" : "eq34"; }

double relation_scale(Relation rel, const RelationParams& p, double x, double V) {
  const double av = std::abs(V);
  if (rel == Relation::case_i) {
    const double ax2 = std::abs(p.a) * x * x;
    const double u = av + ax2;
    return std::abs(p.c) * x * x + p.d * p.d + 2.0 * std::abs(p.d) * u * (3.0 * av + ax2) +
           (9.0 * av + ax2) * u * u * u;
  }
  const double w = av + std::abs(p.b * x);
  return av * w * w + std::abs(p.d);
}

double relation_residual(Relation rel, const RelationParams& p, double x, double V) {
  return std::abs(relation_value(rel, p, x, V)) / (1e-300 + relation_scale(rel, p, x, V));
}

std::vector<double> scan_roots(Relation rel, const RelationParams& p, double x, Interval window, double resolution) {
  if (!(window.lo < window.hi) || !(resolution > 0.0)) throw PreconditionError("invalid root-scan window");
  const auto n = static_cast<std::size_t>(std::ceil((window.hi - window.lo) / resolution));
  std::vector<double> vs(n + 1), fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    vs[i] = std::min(window.lo + static_cast<double>(i) * resolution, window.hi);
    fs[i] = relation_value(rel, p, x, vs[i]);
  }
  auto F = [&](double V) { return relation_value(rel, p, x, V); };
  std::vector<double> found;
  auto accept = [&](double V) {
    V = schroeder_polish(rel, p, x, V);
    if (V < window.lo - resolution || V > window.hi + resolution) return;
    if (relation_residual(rel, p, x, V) <= 1e-10) found.push_back(V);
  };
  for (std::size_t i = 0; i <= n; ++i) {
    if (fs[i] == 0.0) {
      accept(vs[i]);
      continue;
    }
    if (i < n && fs[i] * fs[i + 1] < 0.0) {
      boost::uintmax_t iters = 100;
      auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * (1.0 + std::abs(a)); };
      const auto br = boost::math::tools::toms748_solve(F, vs[i], vs[i + 1], fs[i], fs[i + 1], tol, iters);
      accept(0.5 * (br.first + br.second));
    }
    const bool left_higher = i == 0 || std::abs(fs[i - 1]) > std::abs(fs[i]);
    const bool right_not_lower = i == n || std::abs(fs[i + 1]) >= std::abs(fs[i]);
    if (left_higher && right_not_lower && i > 0 && i < n) accept(vs[i]);
  }
  std::sort(found.begin(), found.end());
  std::vector<double> roots;
  for (double v : found)
    if (roots.empty() || std::abs(v - roots.back()) > 1e-6 * (1.0 + std::abs(v))) roots.push_back(v);
  return roots;
}

std::vector<double> BranchTrace::residuals() const {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = relation_residual(relation, params, x[i], v[i]);
  return r;
}

void BranchTrace::write_csv(std::ostream& os) const {
  const auto r = residuals();
  const auto old = os.precision(17);
  os << "x,V1,residual\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << v[i] << ',' << r[i] << '\n';
  os.precision(old);
}

namespace {

// Moves (x, V) along the branch to x_target with predictor-corrector substeps.
void advance(Relation rel, const RelationParams& p, double& x, double& V, double x_target) {
  double h = x_target - x;
  while (x != x_target) {
    const double remaining = x_target - x;
    const double dx = std::abs(h) >= std::abs(remaining) ? remaining : h;
    const LocalDerivs l = local(rel, p, x, V);
    if (is_turning(rel, p, x, V, l)) throw BranchTurningError("implicit derivative vanishes on the " + describe(rel, x, V));
    const double slope = -l.fx / l.fv;
    const double predicted = V + slope * dx;
    double corrected = predicted;
    const bool ok = newton_at(rel, p, x + dx, corrected) &&
                    std::abs(corrected - predicted) <= 0.05 * std::abs(slope * dx) + 1e-9 * (1.0 + std::abs(V));
    if (!ok) {
      h = 0.5 * dx;
      if (std::abs(h) < 1e-12) throw BranchTurningError("continuation stalled on the " + describe(rel, x, V));
      continue;
    }
    x = (dx == remaining) ? x_target : x + dx;
    V = corrected;
    h = 1.5 * dx;
  }
  const LocalDerivs l = local(rel, p, x, V);
  if (is_turning(rel, p, x, V, l)) throw BranchTurningError("implicit derivative vanishes on the " + describe(rel, x, V));
}

}  // namespace

BranchTrace continue_branch(Relation rel, const RelationParams& p, const std::vector<double>& xgrid,
                            std::pair<double, double> seed) {
  if (xgrid.empty()) throw PreconditionError("empty x-grid");
  for (std::size_t i = 1; i < xgrid.size(); ++i)
    if (!(xgrid[i] > xgrid[i - 1])) throw PreconditionError("x-grid must be strictly increasing");
  auto [x0, v0] = seed;
  if (!std::isfinite(x0) || !std::isfinite(v0) || x0 < xgrid.front() || x0 > xgrid.back())
    throw SeedInvalidError("seed abscissa must lie inside the grid range");
  if (relation_residual(rel, p, x0, v0) > 1e-8)
    throw SeedInvalidError("seed does not satisfy the relation: " + describe(rel, x0, v0));
  double vs = v0;
  if (!newton_at(rel, p, x0, vs)) vs = v0;

  BranchTrace t;
  t.relation = rel;
  t.params = p;
  t.seed = {x0, vs};
  t.x = xgrid;
  t.v.assign(xgrid.size(), 0.0);
  const auto split = static_cast<std::size_t>(std::lower_bound(xgrid.begin(), xgrid.end(), x0) - xgrid.begin());
  double x = x0, V = vs;
  for (std::size_t i = split; i < xgrid.size(); ++i) {
    advance(rel, p, x, V, xgrid[i]);
    t.v[i] = V;
  }
  x = x0;
  V = vs;
  for (std::size_t i = split; i-- > 0;) {
    advance(rel, p, x, V, xgrid[i]);
    t.v[i] = V;
  }
  return t;
}

BranchTrace trace_maximal(Relation rel, const RelationParams& p, std::pair<double, double> seed, Interval range,
                          double step) {
  if (!(step > 0.0) || !range.contains(seed.first)) throw PreconditionError("invalid branch tracing range");
  double vs = seed.second;
  if (relation_residual(rel, p, seed.first, vs) > 1e-8 || !newton_at(rel, p, seed.first, vs))
    throw SeedInvalidError("seed does not satisfy the relation: " + describe(rel, seed.first, seed.second));
  auto walk = [&](double dir) {
    std::vector<std::pair<double, double>> pts;
    double x = seed.first, V = vs;
    for (int k = 1;; ++k) {
      const double xt = seed.first + dir * k * step;
      if (!range.contains(xt)) break;
      try {
        advance(rel, p, x, V, xt);
      } catch (const Error&) {
        for (int drop = 0; drop < 2 && !pts.empty(); ++drop) pts.pop_back();
        break;
      }
      pts.emplace_back(x, V);
    }
    return pts;
  };
  const auto fwd = walk(1.0);
  const auto bwd = walk(-1.0);
  BranchTrace t;
  t.relation = rel;
  t.params = p;
  t.seed = {seed.first, vs};
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) {
    t.x.push_back(it->first);
    t.v.push_back(it->second);
  }
  t.x.push_back(seed.first);
  t.v.push_back(vs);
  for (const auto& [x, v] : fwd) {
    t.x.push_back(x);
    t.v.push_back(v);
  }
  return t;
}

BranchTrace solve_case_i_branch(double a, double c, double d, const std::vector<double>& xgrid,
                                std::pair<double, double> seed) {
  RelationParams p;
  p.a = a;
  p.c = c;
  p.d = d;
  return continue_branch(Relation::case_i, p, xgrid, seed);
}

BranchTrace solve_case_ii_branch(double b, double d, const std::vector<double>& xgrid,
                                 std::pair<double, double> seed) {
  RelationParams p;
  p.b = b;
  p.d = d;
  return continue_branch(Relation::case_ii, p, xgrid, seed);
}

Potential1D branch_potential(const BranchTrace& trace, std::string label) {
  if (trace.x.size() < 2) throw PreconditionError("branch potential needs at least two trace points");
  const Relation rel = trace.relation;
  const RelationParams p = trace.params;
  std::vector<double> slopes(trace.x.size());
  for (std::size_t i = 0; i < trace.x.size(); ++i) {
    const LocalDerivs l = local(rel, p, trace.x[i], trace.v[i]);
    slopes[i] = -l.fx / l.fv;
  }
  auto xs = std::make_shared<const std::vector<double>>(trace.x);
  auto vs = std::make_shared<const std::vector<double>>(trace.v);
  auto ss = std::make_shared<const std::vector<double>>(std::move(slopes));
  auto eval = [rel, p, xs, vs, ss](double x) {
    const auto& X = *xs;
    auto it = std::upper_bound(X.begin(), X.end(), x);
    std::size_t i = it == X.begin() ? 0 : static_cast<std::size_t>(it - X.begin()) - 1;
    i = std::min(i, X.size() - 2);
    // cubic Hermite guess, then Newton onto the branch
    const double h = X[i + 1] - X[i], t = (x - X[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    double V = h00 * (*vs)[i] + h10 * h * (*ss)[i] + h01 * (*vs)[i + 1] + h11 * h * (*ss)[i + 1];
    newton_at(rel, p, x, V);
    const LocalDerivs l = local(rel, p, x, V);
    if (is_turning(rel, p, x, V, l)) throw BranchTurningError("implicit derivative vanishes on the " + describe(rel, x, V));
    const Jet<4> Xj = Jet<4>::variable(x);
    Jet<4> Vj(V);
    for (std::size_t k = 1; k <= 4; ++k) {
      const Jet<4> F = relation_value(rel, p, Xj, Vj);
      Vj[k] = -F[k] / l.fv;
    }
    return stack_from_jet(Vj);
  };
  const double pad = 1e-12 * (1.0 + std::max(std::abs(trace.x.front()), std::abs(trace.x.back())));
  return Potential1D(eval, {}, std::move(label), Interval{trace.x.front() - pad, trace.x.back() + pad});
}

InterpOscillator build_interp_oscillator(double a, double d_tilde, int sign) {
  if (a == 0.0) throw PreconditionError("interpolating oscillator needs a != 0");
  if (!(d_tilde >= 0.0)) throw PreconditionError("interpolating oscillator needs d_tilde >= 0");
  if (sign != 1 && sign != -1) throw PreconditionError("sign must be +1 or -1");
  const double s = sign;
  auto f = [a, d_tilde, s](auto x) {
    using std::sqrt;
    const auto u = x + s * 2.0 * sqrt(d_tilde + x * x);
    return (a / 9.0) * u * u;
  };
  std::ostringstream label;
  label << "(" << a << "/9)(x " << (sign > 0 ? "+" : "-") << " 2 sqrt(" << d_tilde << " + x^2))^2";
  InterpOscillator out;
  // at d~ = 0 the square root |x| is not differentiable at x = 0
  std::vector<double> sing;
  if (d_tilde == 0.0) sing.push_back(0.0);
  out.potential = Potential1D::closed_form(label.str(), f, sing);
  out.offset_to_numerator_form = -2.0 * a * d_tilde / 9.0;
  out.c = 128.0 * std::pow(a, 4) * std::pow(d_tilde, 3) / 729.0;
  out.d = 4.0 * a * a * d_tilde * d_tilde / 27.0;
  return out;
}

double FirstIntegralSample::relative_deviation() const { return max_deviation / std::max(std::abs(mean), 1e-300); }

FirstIntegralSample sample_from_values(std::vector<double> x, std::vector<double> values) {
  FirstIntegralSample s;
  s.x = std::move(x);
  s.values = std::move(values);
  if (s.values.empty()) return s;
  double sum = 0.0;
  for (double v : s.values) sum += v;
  s.mean = sum / static_cast<double>(s.values.size());
  for (double v : s.values) s.max_deviation = std::max(s.max_deviation, std::abs(v - s.mean));
  return s;
}

FirstIntegralSample check_first_integral_case_i(const Potential1D& v1, double a, double hbar,
                                                const std::vector<double>& xgrid) {
  std::vector<double> vals;
  vals.reserve(xgrid.size());
  for (double x : xgrid) {
    const DerivStack s = v1(x);
    const double V = s[0], V1 = s[1], V2 = s[2], V3 = s[3];
    const double ax2 = a * x * x;
    vals.push_back(hbar * hbar * (x * V3 - V2) + 4.0 * x * (ax2 - 3.0 * V) * V1 + 6.0 * V * V + 12.0 * ax2 * V -
                   2.0 * ax2 * ax2);
  }
  return sample_from_values(xgrid, std::move(vals));
}

FirstIntegralSample check_first_integral_case_ii(const Potential1D& v1, double b, double hbar,
                                                 const std::vector<double>& xgrid) {
  std::vector<double> vals;
  vals.reserve(xgrid.size());
  const double h2 = hbar * hbar;
  for (double x : xgrid) {
    const DerivStack s = v1(x);
    const double V = s[0], V1 = s[1], V2 = s[2];
    const double w = V - b * x;
    vals.push_back(2.0 * b * h2 * w * V2 + b * h2 * (2.0 * b - V1) * V1 - 8.0 * b * V * w * w);
  }
  return sample_from_values(xgrid, std::move(vals));
}

Potential1D w_from_p4(std::shared_ptr<const specfun::SpecFunSolution> p4, double b, double hbar, double b1,
                      double K1) {
  if (!p4 || p4->kind() != specfun::Kind::p4) throw PreconditionError("w_from_p4 needs a P4 solution");
  if (b == 0.0) throw PreconditionError("w_from_p4 needs b != 0");
  if (!(hbar > 0.0)) throw PreconditionError("w_from_p4 needs hbar > 0");
  const double alpha = b / (hbar * hbar);
  if (std::abs(p4->params().alpha - alpha) > 1e-12 * (1.0 + std::abs(alpha)))
    throw PreconditionError("P4 solution was built with alpha != b / hbar^2");
  auto eval = [p4, b, hbar, b1, K1](double x) {
    const auto [P, dP] = specfun::scaled_jets(*p4, 1.0, x);
    const Jet<4> X = Jet<4>::variable(x);
    const Jet<4> W = (0.5 * hbar * b1) * dP - (0.5 * b) * P * P - (0.5 * b) * X * P -
                     ((0.5 * b) * X * X + (hbar * hbar * K1 - hbar * b1)) / 6.0;
    return stack_from_jet(W);
  };
  return Potential1D(eval, {}, "W from P4", specfun::scaled_domain(*p4, 1.0));
}

double w_equation_residual(const Potential1D& w, double b, double hbar, double x) {
  const DerivStack s = w(x);
  const double t[] = {hbar * hbar * s[4], 12.0 * s[0] * s[2], 12.0 * s[1] * s[1], b * x * s[1], 2.0 * b * s[0],
                      b * b * x * x / 6.0};
  const double r = t[0] - (t[1] + t[2] + t[3] + t[4] - t[5]);
  double scale = 0.0;
  for (double v : t) scale = std::max(scale, std::abs(v));
  return std::abs(r) / (1.0 + scale);
}

Potential1D y_formula(std::shared_ptr<const specfun::SpecFunSolution> p2, double beta) {
  if (!p2 || p2->kind() != specfun::Kind::p2) throw PreconditionError("Y construction needs a P2 solution");
  if (beta == 0.0) throw PreconditionError("Y construction needs beta != 0");
  auto eval = [p2, beta](double xi) {
    const auto [P, dP] = specfun::scaled_jets(*p2, 1.0, xi);
    const Jet<4> X = Jet<4>::variable(xi);
    return stack_from_jet((dP + P * P + 0.5 * X) / (2.0 * beta));
  };
  return Potential1D(eval, {}, "Y from P2", specfun::scaled_domain(*p2, 1.0));
}

Potential1D y_from_p2(std::shared_ptr<const specfun::SpecFunSolution> p2, double beta) {
  if (!p2 || p2->kind() != specfun::Kind::p2) throw PreconditionError("y_from_p2 needs a P2 solution");
  const double kappa = -2.0 * beta - 0.5;
  if (std::abs(p2->params().alpha - kappa) > 1e-12 * (1.0 + std::abs(kappa)))
    throw PreconditionError("P2 solution must be built with alpha = -2 beta - 1/2");
  Potential1D y = y_formula(p2, beta);
  const Interval dom = y.domain();
  constexpr int kSamples = 4000;
  double prev = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double xi = dom.lo + (i + 0.5) * dom.width() / kSamples;
    const double v = y.value(xi);
    if (v == 0.0 || (i > 0 && v * prev < 0.0)) {
      std::ostringstream msg;
      msg << "Y vanishes near xi = " << xi << " inside the P2 validity interval";
      throw specfun::ZeroCrossingError(msg.str());
    }
    prev = v;
  }
  return y;
}

double y_equation_residual(const Potential1D& y, double beta, double xi) {
  const DerivStack s = y(xi);
  const double Y = s[0], Y1 = s[1], Y2 = s[2];
  // grouped so that exact solutions cancel term by term
  const double r = Y2 - ((Y1 * Y1 - 1.0) / (2.0 * Y) + Y * (4.0 * beta * Y - xi));
  const double scale = std::max({std::abs(Y2), std::abs(Y1 * Y1 / (2.0 * Y)), std::abs(1.0 / (2.0 * Y)),
                                 std::abs(4.0 * beta * Y * Y), std::abs(xi * Y)});
  return std::abs(r) / (1.0 + scale);
}

SeparablePotential v_case_ii_quantum(double a, double b, double hbar, const CaseIIRoute& route, Interval x_domain) {
  if (a == 0.0 || b == 0.0) throw PreconditionError("case ii potential needs a != 0 and b != 0");
  if (!(hbar > 0.0)) throw PreconditionError("case ii quantum potential needs hbar > 0");
  if (!(x_domain.lo < x_domain.hi) || !std::isfinite(x_domain.lo) || !std::isfinite(x_domain.hi))
    throw PreconditionError("case ii potential needs a finite x-domain");
  const bool zero_k2 = route.kind == CaseIIRoute::Kind::zero_k2;
  const double s = zero_k2 ? std::cbrt(2.0 * b / (hbar * hbar)) : -std::cbrt(4.0 * b / (hbar * hbar));
  const double z1 = s * x_domain.lo, z2 = s * x_domain.hi;
  const Interval zi{std::min(z1, z2), std::max(z1, z2)};
  auto sol = std::make_shared<const specfun::SpecFunSolution>(
      specfun::painleve2({zi.lo - 0.25, zi.hi + 0.25}, zero_k2 ? 0.0 : route.kappa, route.ic));
  if (!sol->covers(zi.lo) || !sol->covers(zi.hi)) {
    std::ostringstream msg;
    msg << "P2 solution has a pole inside the working domain (validity [" << sol->validity().lo << ", "
        << sol->validity().hi << "] in the P2 variable)";
    throw specfun::PoleCollisionError(msg.str(), sol);
  }
  Potential1D v1;
  if (zero_k2) {
    const double amp = std::pow(std::cbrt(2.0 * hbar * b), 2);
    auto eval = [sol, s, amp, b](double x) {
      const auto [P, dP] = specfun::scaled_jets(*sol, s, x);
      return stack_from_jet(b * Jet<4>::variable(x) + amp * P * P);
    };
    v1 = Potential1D(eval, {}, "b x + (2 hbar b)^(2/3) P2(s x, 0)^2", specfun::scaled_domain(*sol, s));
  } else {
    const double amp = std::cbrt(2.0 * hbar * hbar * b * b);
    auto eval = [sol, s, amp](double x) {
      const auto [P, dP] = specfun::scaled_jets(*sol, s, x);
      return stack_from_jet(amp * (dP + P * P));
    };
    v1 = Potential1D(eval, {}, "(2 hbar^2 b^2)^(1/3) (P2' + P2^2)(z, kappa)", specfun::scaled_domain(*sol, s));
  }
  Potential1D v2 = Potential1D::closed_form("a y", [a](auto y) { return a * y; });
  return SeparablePotential{v1, v2, hbar};
}

}  // namespace sepint::implicit
