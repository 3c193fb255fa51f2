#include "sepint/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace sepint::specfun {

namespace {

constexpr int N = kTaylorOrder;
using TJet = Jet<N>;
using Segment = SpecFunSolution::Segment;

constexpr double kStepEps = 1e-18;
constexpr double kMaxStep = 1.0;
constexpr double kMinStep = 1e-12;
constexpr std::size_t kMaxSteps = 2'000'000;

struct Sweep {
  std::vector<Segment> segs;
  double reached = 0.0;
  std::optional<double> pole;
};

bool all_finite(const TJet& J) {
  for (double c : J.coefficients())
    if (!std::isfinite(c)) return false;
  return true;
}

double step_size(const TJet& J) {
  const double scale = std::max(1.0, std::abs(J[0]));
  double h = kMaxStep;
  for (int k : {N - 1, N}) {
    const double ck = std::abs(J[static_cast<std::size_t>(k)]);
    if (ck > 0.0) h = std::min(h, std::pow(kStepEps * scale / ck, 1.0 / k));
  }
  return 0.8 * h;
}

// Pole location from y ~ c (x - p)^(-m): y'^2 / (y y'') = m / (m + 1).
double estimate_pole(const TJet& J, double x, double dir) {
  const double y = J[0], yp = J[1], ypp = 2.0 * J[2];
  if (y == 0.0 || yp == 0.0 || ypp == 0.0) return x;
  const double r = yp * yp / (y * ypp);
  if (!(r > 0.0 && r < 1.0)) return x;
  const double m = std::max(1.0, std::round(r / (1.0 - r)));
  const double p = x + m * y / yp;
  return (p - x) * dir >= 0.0 ? p : x;
}

Sweep sweep(Kind kind, const SpecParams& prm, double x0, double y0, double yp0, double x_end) {
  Sweep r;
  r.reached = x0;
  if (x_end == x0) return r;
  const double dir = x_end > x0 ? 1.0 : -1.0;
  const bool watch_zero = kind == Kind::p4 && prm.K2 != 0.0;
  double x = x0, y = y0, yp = yp0;
  for (std::size_t steps = 0;; ++steps) {
    if (steps > kMaxSteps) throw StepFailureError("special-function integration exceeded the step budget");
    if (watch_zero && std::abs(y) < 1e-12) {
      std::ostringstream msg;
      msg << "P4 solution reaches y = 0 near x = " << x << " with K2 != 0";
      throw ZeroCrossingError(msg.str());
    }
    const TJet J = ode_jet<N>(kind, prm, x, y, yp);
    if (std::abs(y) > kBlowUp) {
      r.pole = estimate_pole(J, x, dir);
      break;
    }
    const double h_est = all_finite(J) ? step_size(J) : 0.0;
    if (!(h_est >= kMinStep)) {
      if (watch_zero && std::abs(y) < 1e-3) {
        std::ostringstream msg;
        msg << "P4 solution approaches y = 0 near x = " << x << " with K2 != 0";
        throw ZeroCrossingError(msg.str());
      }
      r.pole = all_finite(J) ? estimate_pole(J, x, dir) : x;
      break;
    }
    const double remaining = std::abs(x_end - x);
    const bool last = h_est >= remaining;
    const double h = last ? remaining : h_est;
    Segment seg;
    seg.x0 = x;
    seg.h = dir * h;
    seg.c = J.coefficients();
    const double yn = J.eval(dir * h);
    const double ypn = J.differentiate().eval(dir * h);
    if (watch_zero && yn * y <= 0.0) {
      std::ostringstream msg;
      msg << "P4 solution crosses y = 0 between x = " << x << " and " << x + dir * h << " with K2 != 0";
      throw ZeroCrossingError(msg.str());
    }
    r.segs.push_back(seg);
    x = last ? x_end : x + dir * h;
    y = yn;
    yp = ypn;
    r.reached = x;
    if (last) break;
  }
  return r;
}

void require_finite_ic(const PainleveIC& ic) {
  if (!std::isfinite(ic.x0) || !std::isfinite(ic.y0) || !std::isfinite(ic.yp0))
    throw SchemaError("initial condition must be finite");
}

void require_interval(const Interval& iv) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
    throw SchemaError("interval must be finite with lo < hi");
}

SpecFunSolution integrate_from_ic(Kind kind, const SpecParams& prm, Interval interval, const PainleveIC& ic) {
  require_interval(interval);
  require_finite_ic(ic);
  const double fwd_end = std::max(interval.hi, ic.x0);
  const double bwd_end = std::min(interval.lo, ic.x0);
  Sweep f = sweep(kind, prm, ic.x0, ic.y0, ic.yp0, fwd_end);
  Sweep b = sweep(kind, prm, ic.x0, ic.y0, ic.yp0, bwd_end);
  const auto immediate = [&](const Sweep& s) {
    return s.pole && (s.segs.empty() || std::abs(*s.pole - ic.x0) <= kPoleMargin);
  };
  if (immediate(f) || immediate(b)) {
    std::ostringstream msg;
    msg << to_string(kind) << " initial condition at x0 = " << ic.x0 << " is at or next to a pole";
    throw ImmediatePoleError(msg.str());
  }
  Interval validity{bwd_end, fwd_end};
  std::vector<double> poles;
  if (b.pole) {
    poles.push_back(*b.pole);
    validity.lo = std::max(*b.pole + kPoleMargin, b.reached);
  }
  if (f.pole) {
    poles.push_back(*f.pole);
    validity.hi = std::min(*f.pole - kPoleMargin, f.reached);
  }
  std::sort(poles.begin(), poles.end());
  return SpecFunSolution(kind, prm, validity, std::move(poles), ic.x0, std::move(f.segs), std::move(b.segs), false);
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::weierstrass:
      return "wp";
    case Kind::p1:
      return "p1";
    case Kind::p2:
      return "p2";
    case Kind::p4:
      return "p4";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "wp" || s == "weierstrass") return Kind::weierstrass;
  if (s == "p1") return Kind::p1;
  if (s == "p2") return Kind::p2;
  if (s == "p4") return Kind::p4;
  throw SchemaError("unknown special-function kind '" + s + "'");
}

SpecFunSolution::SpecFunSolution(Kind kind, SpecParams params, Interval validity, std::vector<double> poles,
                                 double origin, std::vector<Segment> forward, std::vector<Segment> backward,
                                 bool zero_branch)
    : kind_(kind),
      params_(params),
      validity_(validity),
      poles_(std::move(poles)),
      origin_(origin),
      forward_(std::make_shared<const std::vector<Segment>>(std::move(forward))),
      backward_(std::make_shared<const std::vector<Segment>>(std::move(backward))),
      zero_branch_(zero_branch) {}

void SpecFunSolution::check_covered(double x) const {
  if (!covers(x)) {
    std::ostringstream msg;
    msg << to_string(kind_) << " solution evaluated at " << x << " outside its validity interval ["
        << validity_.lo << ", " << validity_.hi << "]";
    throw DomainError(msg.str());
  }
}

const Segment& SpecFunSolution::locate(double x) const {
  const auto& fw = *forward_;
  const auto& bw = *backward_;
  if ((x >= origin_ && !fw.empty()) || bw.empty()) {
    auto it = std::upper_bound(fw.begin(), fw.end(), x, [](double v, const Segment& s) { return v < s.x0; });
    return it == fw.begin() ? fw.front() : *(it - 1);
  }
  auto it = std::partition_point(bw.begin(), bw.end(), [x](const Segment& s) { return s.x0 + s.h > x; });
  return it == bw.end() ? bw.back() : *it;
}

std::pair<double, double> SpecFunSolution::eval(double x) const {
  check_covered(x);
  if (zero_branch_) return {0.0, 0.0};
  const Segment& s = locate(x);
  const double t = x - s.x0;
  double v = s.c[N], d = N * s.c[N];
  for (int k = N - 1; k >= 0; --k) v = v * t + s.c[static_cast<std::size_t>(k)];
  for (int k = N - 1; k >= 1; --k) d = d * t + k * s.c[static_cast<std::size_t>(k)];
  return {v, d};
}

double SpecFunSolution::ode_residual(double x) const {
  check_covered(x);
  if (zero_branch_) return 0.0;
  const Segment& s = locate(x);
  const double t = x - s.x0;
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  for (int k = N; k >= 0; --k) {
    const double c = s.c[static_cast<std::size_t>(k)];
    v = v * t + c;
    if (k >= 1) d1 = d1 * t + k * c;
    if (k >= 2) d2 = d2 * t + k * (k - 1.0) * c;
  }
  const double F = rhs(kind_, params_, x, v, d1);
  return std::abs(d2 - F) / (1.0 + std::abs(F));
}

namespace {

constexpr int kLaurentTerms = 40;

std::array<double, kLaurentTerms + 1> laurent_coefficients(double wp_g2, double wp_g3) {
  // P = x^-2 + sum_{k>=2} c_k x^(2k-2)
  std::array<double, kLaurentTerms + 1> c{};
  c[2] = wp_g2 / 20.0;
  c[3] = wp_g3 / 28.0;
  for (int k = 4; k <= kLaurentTerms; ++k) {
    double s = 0.0;
    for (int m = 2; m <= k - 2; ++m) s += c[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(k - m)];
    c[static_cast<std::size_t>(k)] = 3.0 / ((2.0 * k + 1.0) * (k - 3.0)) * s;
  }
  return c;
}

// Largest radius (>= kSeedRadius) at which the truncated Laurent series is converged to
// rounding level. Seeding far from the pole matters: perturbations of the seed grow like x^6.
double laurent_seed_radius(double wp_g2, double wp_g3) {
  const auto c = laurent_coefficients(wp_g2, wp_g3);
  for (double r = 1.0; r > kSeedRadius; r *= 0.8) {
    const double tail = std::abs(c[kLaurentTerms]) * std::pow(r, 2 * kLaurentTerms - 2) +
                        std::abs(c[kLaurentTerms - 1]) * std::pow(r, 2 * kLaurentTerms - 4);
    if (tail < 1e-18 / (r * r)) return r;
  }
  return kSeedRadius;
}

}  // namespace

std::pair<double, double> weierstrass_laurent(double x, double wp_g2, double wp_g3) {
  const auto c = laurent_coefficients(wp_g2, wp_g3);
  double v = 0.0, d = 0.0;
  const double x2 = x * x;
  for (int k = kLaurentTerms; k >= 2; --k) {
    v = v * x2 + c[static_cast<std::size_t>(k)];
    d = d * x2 + (2 * k - 2) * c[static_cast<std::size_t>(k)];
  }
  // v = sum c_k x^(2k-4), d = sum (2k-2) c_k x^(2k-4)
  return {1.0 / x2 + v * x2, -2.0 / (x2 * x) + d * x};
}

SpecFunSolution weierstrass_p(Interval interval, double wp_g2, double wp_g3) {
  require_interval(interval);
  if (!std::isfinite(wp_g2) || !std::isfinite(wp_g3)) throw SchemaError("Weierstrass invariants must be finite");
  if (interval.lo < kSeedRadius && interval.hi > -kSeedRadius)
    throw DomainError("Weierstrass interval must avoid the pole at 0 by at least the seed radius");
  SpecParams prm;
  prm.wp_g2 = wp_g2;
  prm.wp_g3 = wp_g3;
  const bool positive = interval.lo >= kSeedRadius;
  const double radius = laurent_seed_radius(wp_g2, wp_g3);
  const double seed = positive ? radius : -radius;
  const auto [v, d] = weierstrass_laurent(seed, wp_g2, wp_g3);
  const double fwd_end = std::max(interval.hi, seed);
  const double bwd_end = std::min(interval.lo, seed);
  Sweep f = sweep(Kind::weierstrass, prm, seed, v, d, fwd_end);
  Sweep b = sweep(Kind::weierstrass, prm, seed, v, d, bwd_end);
  Interval validity{bwd_end, fwd_end};
  std::vector<double> poles{0.0};
  if (f.pole) {
    poles.push_back(*f.pole);
    validity.hi = std::min(*f.pole - kPoleMargin, f.reached);
  }
  if (b.pole) {
    poles.push_back(*b.pole);
    validity.lo = std::max(*b.pole + kPoleMargin, b.reached);
  }
  std::sort(poles.begin(), poles.end());
  const bool collided = f.pole.has_value() || b.pole.has_value();
  auto sol = std::make_shared<const SpecFunSolution>(Kind::weierstrass, prm, validity, poles, seed,
                                                     std::move(f.segs), std::move(b.segs), false);
  if (collided) {
    std::ostringstream msg;
    msg << "Weierstrass P has a pole at x = " << (f.pole ? *f.pole : *b.pole) << " inside the requested interval";
    throw PoleCollisionError(msg.str(), sol);
  }
  return *sol;
}

SpecFunSolution painleve1(Interval interval, PainleveIC ic) {
  return integrate_from_ic(Kind::p1, SpecParams{}, interval, ic);
}

SpecFunSolution painleve2(Interval interval, double alpha, PainleveIC ic) {
  if (!std::isfinite(alpha)) throw SchemaError("alpha must be finite");
  SpecParams prm;
  prm.alpha = alpha;
  return integrate_from_ic(Kind::p2, prm, interval, ic);
}

SpecFunSolution painleve4(Interval interval, double alpha, double K1, double K2, PainleveIC ic) {
  if (!std::isfinite(alpha) || !std::isfinite(K1) || !std::isfinite(K2))
    throw SchemaError("P4 parameters must be finite");
  if (K2 != 0.0 && ic.y0 == 0.0) throw SchemaError("P4 with K2 != 0 needs y0 != 0");
  if (K2 == 0.0 && ic.y0 == 0.0) {
    if (ic.yp0 != 0.0) throw SchemaError("P4 with y0 = 0 is singular unless the zero branch is requested");
    return painleve4_zero_branch(interval, alpha, K1);
  }
  SpecParams prm;
  prm.alpha = alpha;
  prm.K1 = K1;
  prm.K2 = K2;
  return integrate_from_ic(Kind::p4, prm, interval, ic);
}

SpecFunSolution painleve4_zero_branch(Interval interval, double alpha, double K1) {
  require_interval(interval);
  SpecParams prm;
  prm.alpha = alpha;
  prm.K1 = K1;
  return SpecFunSolution(Kind::p4, prm, interval, {}, interval.lo, {}, {}, true);
}

std::pair<Jet<4>, Jet<4>> scaled_jets(const SpecFunSolution& sol, double s, double x) {
  const Jet<5> q = sol.jet<5>(s * x).scaled(s);
  return {q.truncated<4>(), (q.differentiate() / s).truncated<4>()};
}

Interval scaled_domain(const SpecFunSolution& sol, double s) {
  const double a = sol.validity().lo / s, b = sol.validity().hi / s;
  return {std::min(a, b), std::max(a, b)};
}

DerivStack derivative_tower(const SpecFunSolution& sol, double x, int order) {
  if (order < 2 || order > 4) throw PreconditionError("derivative_tower order must be 2..4");
  DerivStack s = stack_from_jet(sol.jet<4>(x));
  for (int n = order + 1; n <= 4; ++n) s[static_cast<std::size_t>(n)] = std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace sepint::specfun
