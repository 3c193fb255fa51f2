#pragma once

// Classical trajectories of H = (px^2 + py^2)/2 + V1(x) + V2(y) and conservation of H and the
// third-order integrals along them.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/phasecore.hpp"

namespace sepint::dynamics {

struct Event {
  enum class Kind { singularity_approach, step_rejection };
  Kind kind = Kind::step_rejection;
  double t = 0.0;
  std::string detail;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<PhaseState> states;
  double tol = 0.0;
  std::vector<Event> events;
  /// False when integration halted before t_end.
  bool completed = true;
  std::size_t rejected_steps = 0;

  bool halted_at_singularity() const;
};

struct IntegrateOptions {
  /// Minimum distance in position space from singular lines and domain edges.
  double margin = 1e-3;
  /// Further lines to keep away from, e.g. the singular lines of g-fields.
  std::vector<double> avoid_x;
  std::vector<double> avoid_y;
  double initial_step = 1e-3;
  std::size_t max_steps = 50'000'000;
  /// Record every rejected step in the event log (the count is always kept).
  bool log_rejections = false;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of Hamilton's equations with absolute and
/// relative local error tol. Stops with a singularity_approach event (partial trajectory,
/// completed = false) if the state comes within the margin of a singular line or domain edge.
Trajectory integrate(const SeparablePotential& potential, const PhaseState& state0, double t_end, double tol,
                     const IntegrateOptions& options = {});

/// Fixed-step Stormer-Verlet (kick-drift-kick), symplectic and second order.
Trajectory integrate_verlet(const SeparablePotential& potential, const PhaseState& state0, double t_end, double dt,
                            const IntegrateOptions& options = {});

struct QuantityDrift {
  std::string name;
  double initial = 0.0;
  double max_deviation = 0.0;
  /// max_deviation / max(|initial|, kDriftFloor).
  double relative = 0.0;
  /// Largest magnitude of a single term of the quantity seen along the trajectory.
  double term_scale = 0.0;
  /// max_deviation / max(|initial|, term_scale, kDriftFloor); stays meaningful when the
  /// quantity is zero on the trajectory.
  double normalized = 0.0;
};

inline constexpr double kDriftFloor = 1e-12;

struct DriftReport {
  std::vector<QuantityDrift> quantities;  // H first, then X1..Xn
  double max_relative() const;
  /// Largest relative drift among X1..Xn.
  double max_integral_relative() const;
  double max_normalized() const;
};

/// Evaluates H and each integral at every sample. Throws SingularPointError if a sample sits on
/// a singular line of a g-field.
DriftReport conservation_report(const Trajectory& trajectory, const SeparablePotential& potential,
                                const std::vector<ThirdOrderIntegral>& integrals);

/// Header t,x,y,px,py,H,X1..Xn, one row per sample, 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& trajectory, const SeparablePotential& potential,
               const std::vector<ThirdOrderIntegral>& integrals);

/// Uniform draws from the box, rejecting states closer than `margin` to a singular line or
/// domain edge of the potential or a singular line of a g-field. Deterministic in `seed`.
std::vector<PhaseState> random_states(const std::array<Interval, 4>& box, std::size_t n, std::uint64_t seed,
                                      const SeparablePotential& potential,
                                      const std::vector<ThirdOrderIntegral>& integrals, double margin = 0.05);

}  // namespace sepint::dynamics
