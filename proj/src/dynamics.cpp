#include "sepint/dynamics.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace sepint::dynamics {

namespace {

using State = std::array<double, 4>;

PhaseState to_phase(const State& s) { return {s[0], s[1], s[2], s[3]}; }

double line_clearance(const std::vector<double>& lines, double t) {
  double c = std::numeric_limits<double>::infinity();
  for (double s : lines) c = std::min(c, std::abs(t - s));
  return c;
}

double clearance(const SeparablePotential& pot, const IntegrateOptions& o, double x, double y) {
  return std::min({pot.clearance(x, y), line_clearance(o.avoid_x, x), line_clearance(o.avoid_y, y)});
}

void require_start(const SeparablePotential& pot, const IntegrateOptions& o, const PhaseState& s) {
  if (!(clearance(pot, o, s.x, s.y) >= o.margin)) {
    std::ostringstream msg;
    msg << "initial state (" << s.x << ", " << s.y << ") lies within " << o.margin
        << " of a singular line or domain edge";
    throw SingularPointError(msg.str());
  }
}

std::string approach_detail(double x, double y, double margin) {
  std::ostringstream msg;
  msg << "state (" << x << ", " << y << ") came within " << margin << " of a singular line or domain edge";
  return msg.str();
}

double energy_terms(const SeparablePotential& pot, const PhaseState& s) {
  return std::max({0.5 * s.px * s.px, 0.5 * s.py * s.py, std::abs(pot.v1.value(s.x)), std::abs(pot.v2.value(s.y))});
}

double integral_terms(const ThirdOrderIntegral& I, const PhaseState& s) {
  const double L = s.x * s.py - s.y * s.px;
  const auto A = I.coeffs.as_array();
  const auto& ex = CoeffTensor::exponents();
  double m = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (A[k] == 0.0) continue;
    m = std::max(m, std::abs(2.0 * A[k] * std::pow(L, ex[k][0]) * std::pow(s.px, ex[k][1]) * std::pow(s.py, ex[k][2])));
  }
  if (!I.corrections.trivial) {
    m = std::max(m, std::abs(2.0 * I.corrections.g1(s.x, s.y).value * s.px));
    m = std::max(m, std::abs(2.0 * I.corrections.g2(s.x, s.y).value * s.py));
  }
  return m;
}

}  // namespace

bool Trajectory::halted_at_singularity() const {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& e) { return e.kind == Event::Kind::singularity_approach; });
}

Trajectory integrate(const SeparablePotential& pot, const PhaseState& state0, double t_end, double tol,
                     const IntegrateOptions& o) {
  if (pot.hbar != 0.0) throw PreconditionError("classical integration needs hbar = 0");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be finite and >= 0");
  require_start(pot, o, state0);

  namespace odeint = boost::numeric::odeint;
  auto rhs = [&pot](const State& s, State& ds, double) {
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = -pot.v1(s[0])[1];
    ds[3] = -pot.v2(s[1])[1];
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());

  Trajectory tr;
  tr.tol = tol;
  State s{state0.x, state0.y, state0.px, state0.py};
  double t = 0.0, dt = std::min(o.initial_step, std::max(t_end, 1e-300));
  tr.t.push_back(t);
  tr.states.push_back(state0);
  std::size_t steps = 0;
  while (t < t_end) {
    if (++steps > o.max_steps) throw StepFailureError("step budget exhausted before t_end");
    dt = std::min(dt, t_end - t);
    const double t_prev = t;
    const State s_prev = s;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(rhs, s, t, dt);
    } catch (const SingularPointError&) {
      res = odeint::fail;
    } catch (const DomainError&) {
      res = odeint::fail;
    }
    if (res == odeint::fail) {
      // a stage left the domain or the error estimate was too large
      s = s_prev;
      t = t_prev;
      dt *= 0.5;
      ++tr.rejected_steps;
      if (o.log_rejections) tr.events.push_back({Event::Kind::step_rejection, t, "step rejected"});
      if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
        const double c = clearance(pot, o, s[0], s[1]);
        if (c < 10.0 * o.margin) {
          tr.events.push_back({Event::Kind::singularity_approach, t, approach_detail(s[0], s[1], o.margin)});
          tr.completed = false;
          return tr;
        }
        throw StepFailureError("step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    if (!std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); }))
      throw StepFailureError("non-finite state at t = " + std::to_string(t));
    if (clearance(pot, o, s[0], s[1]) < o.margin) {
      tr.events.push_back({Event::Kind::singularity_approach, t, approach_detail(s[0], s[1], o.margin)});
      tr.completed = false;
      return tr;
    }
    if (t_end - t < 1e-15 * std::max(1.0, t_end)) t = t_end;
    tr.t.push_back(t);
    tr.states.push_back(to_phase(s));
  }
  return tr;
}

Trajectory integrate_verlet(const SeparablePotential& pot, const PhaseState& state0, double t_end, double dt,
                            const IntegrateOptions& o) {
  if (pot.hbar != 0.0) throw PreconditionError("classical integration needs hbar = 0");
  if (!(dt > 0.0)) throw PreconditionError("step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be finite and >= 0");
  require_start(pot, o, state0);
  Trajectory tr;
  tr.tol = dt;
  tr.t.push_back(0.0);
  tr.states.push_back(state0);
  PhaseState s = state0;
  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = n ? t_end / static_cast<double>(n) : 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    s.px -= 0.5 * h * pot.v1(s.x)[1];
    s.py -= 0.5 * h * pot.v2(s.y)[1];
    s.x += h * s.px;
    s.y += h * s.py;
    const double t = static_cast<double>(k) * h;
    if (clearance(pot, o, s.x, s.y) < o.margin) {
      tr.events.push_back({Event::Kind::singularity_approach, t, approach_detail(s.x, s.y, o.margin)});
      tr.completed = false;
      return tr;
    }
    s.px -= 0.5 * h * pot.v1(s.x)[1];
    s.py -= 0.5 * h * pot.v2(s.y)[1];
    tr.t.push_back(t);
    tr.states.push_back(s);
  }
  return tr;
}

double DriftReport::max_relative() const {
  double m = 0.0;
  for (const auto& q : quantities) m = std::max(m, q.relative);
  return m;
}

double DriftReport::max_normalized() const {
  double m = 0.0;
  for (const auto& q : quantities) m = std::max(m, q.normalized);
  return m;
}

double DriftReport::max_integral_relative() const {
  double m = 0.0;
  for (std::size_t k = 1; k < quantities.size(); ++k) m = std::max(m, quantities[k].relative);
  return m;
}

DriftReport conservation_report(const Trajectory& tr, const SeparablePotential& pot,
                                const std::vector<ThirdOrderIntegral>& integrals) {
  if (tr.states.empty()) throw PreconditionError("empty trajectory");
  const std::size_t nq = integrals.size() + 1;
  std::vector<QuantityDrift> q(nq);
  q[0].name = "H";
  for (std::size_t k = 0; k < integrals.size(); ++k) q[k + 1].name = "X" + std::to_string(k + 1);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const PhaseState& s = tr.states[i];
    for (std::size_t k = 0; k < nq; ++k) {
      double v;
      if (k == 0) {
        v = hamiltonian(pot, s);
        q[k].term_scale = std::max(q[k].term_scale, energy_terms(pot, s));
      } else {
        require_regular(integrals[k - 1].corrections, s.x, s.y);
        v = eval_integral_classical(integrals[k - 1], s);
        q[k].term_scale = std::max(q[k].term_scale, integral_terms(integrals[k - 1], s));
      }
      if (i == 0) q[k].initial = v;
      q[k].max_deviation = std::max(q[k].max_deviation, std::abs(v - q[k].initial));
    }
  }
  for (auto& e : q) {
    e.relative = e.max_deviation / std::max(std::abs(e.initial), kDriftFloor);
    e.normalized = e.max_deviation / std::max({std::abs(e.initial), e.term_scale, kDriftFloor});
  }
  return {q};
}

void write_csv(std::ostream& os, const Trajectory& tr, const SeparablePotential& pot,
               const std::vector<ThirdOrderIntegral>& integrals) {
  os << "t,x,y,px,py,H";
  for (std::size_t k = 0; k < integrals.size(); ++k) os << ",X" << k + 1;
  os << '\n';
  char buf[32];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const PhaseState& s = tr.states[i];
    put(tr.t[i]);
    for (double v : {s.x, s.y, s.px, s.py, hamiltonian(pot, s)}) {
      os << ',';
      put(v);
    }
    for (const auto& I : integrals) {
      os << ',';
      put(eval_integral_classical(I, s));
    }
    os << '\n';
  }
}

std::vector<PhaseState> random_states(const std::array<Interval, 4>& box, std::size_t n, std::uint64_t seed,
                                      const SeparablePotential& pot, const std::vector<ThirdOrderIntegral>& integrals,
                                      double margin) {
  for (const auto& iv : box)
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw PreconditionError("state box must be finite");
  std::mt19937_64 rng(seed);
  auto draw = [&](const Interval& iv) { return std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng); };
  IntegrateOptions o;
  for (const auto& I : integrals) {
    o.avoid_x.insert(o.avoid_x.end(), I.corrections.singular_x.begin(), I.corrections.singular_x.end());
    o.avoid_y.insert(o.avoid_y.end(), I.corrections.singular_y.begin(), I.corrections.singular_y.end());
  }
  std::vector<PhaseState> out;
  for (std::size_t tries = 0; out.size() < n; ++tries) {
    if (tries > 10000 * (n + 1)) throw DomainError("state box has no regular points at this margin");
    PhaseState s{draw(box[0]), draw(box[1]), draw(box[2]), draw(box[3])};
    if (clearance(pot, o, s.x, s.y) >= margin) out.push_back(s);
  }
  return out;
}

}  // namespace sepint::dynamics
