#pragma once

// Implicitly defined classical potentials (root branches of polynomial relations in V1),
// first integrals of the reduced ODEs, and the Painleve-built potentials of cases i and ii.

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/phasecore.hpp"
#include "sepint/specfun.hpp"

namespace sepint::implicit {

enum class Relation {
  case_i,   // c x^2 - d^2 + 2d(V - a x^2)(3V + a x^2) = (9V - a x^2)(V - a x^2)^3
  case_ii,  // V (V - b x)^2 = d
};

std::string to_string(Relation r);

struct RelationParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Left side minus right side of the relation.
template <class T>
T relation_value(Relation rel, const RelationParams& p, const T& x, const T& V) {
  if (rel == Relation::case_i) {
    const T ax2 = p.a * x * x;
    const T u = V - ax2;
    return p.c * x * x - p.d * p.d + 2.0 * p.d * u * (3.0 * V + ax2) - (9.0 * V - ax2) * (u * u * u);
  }
  const T w = V - p.b * x;
  return V * (w * w) - p.d;
}

/// Largest magnitude among the relation's terms; the natural scale for its residual.
double relation_scale(Relation rel, const RelationParams& p, double x, double V);

/// Residual normalized by (1e-300 + scale).
double relation_residual(Relation rel, const RelationParams& p, double x, double V);

/// Real roots in V of the relation at fixed x inside `window`, found by a dense scan at
/// `resolution` (sign changes and local minima of |F|) and a multiplicity-robust polish.
std::vector<double> scan_roots(Relation rel, const RelationParams& p, double x, Interval window,
                               double resolution = 1e-3);

struct BranchTrace {
  std::vector<double> x;
  std::vector<double> v;
  Relation relation = Relation::case_i;
  RelationParams params;
  std::pair<double, double> seed{0.0, 0.0};

  std::vector<double> residuals() const;
  /// Columns x, V1, residual.
  void write_csv(std::ostream& os) const;
};

/// Newton continuation of one root of the case i relation along an increasing x-grid from a seed.
BranchTrace solve_case_i_branch(double a, double c, double d, const std::vector<double>& xgrid,
                                std::pair<double, double> seed);
/// Same for V (V - b x)^2 = d.
BranchTrace solve_case_ii_branch(double b, double d, const std::vector<double>& xgrid,
                                 std::pair<double, double> seed);
BranchTrace continue_branch(Relation rel, const RelationParams& p, const std::vector<double>& xgrid,
                            std::pair<double, double> seed);

/// Traces the branch through `seed` on a uniform grid of spacing `step` inside `range`,
/// stopping two steps short of wherever continuation fails (turning point, stall).
BranchTrace trace_maximal(Relation rel, const RelationParams& p, std::pair<double, double> seed, Interval range,
                          double step);

/// Potential evaluating the traced branch anywhere inside the trace range: the value is
/// Newton-polished from the interpolated trace, derivatives come from implicit Taylor solving.
Potential1D branch_potential(const BranchTrace& trace, std::string label);

struct InterpOscillator {
  Potential1D potential;
  /// Constant to add to this potential to obtain the form with the 2 d~ + 5 x^2 numerator.
  double offset_to_numerator_form = 0.0;
  /// Parameters of the case i relation whose branch this family reproduces (after the offset).
  double c = 0.0;
  double d = 0.0;
};

/// V1 = (a/9)(x +- 2 sqrt(d~ + x^2))^2.
InterpOscillator build_interp_oscillator(double a, double d_tilde, int sign);

struct FirstIntegralSample {
  std::vector<double> x;
  std::vector<double> values;
  double mean = 0.0;
  double max_deviation = 0.0;

  double relative_deviation() const;
};

FirstIntegralSample sample_from_values(std::vector<double> x, std::vector<double> values);

/// k = hbar^2 (x V''' - V'') + 4x(a x^2 - 3V)V' + 6V^2 + 12 a x^2 V - 2 a^2 x^4.
FirstIntegralSample check_first_integral_case_i(const Potential1D& v1, double a, double hbar,
                                                const std::vector<double>& xgrid);
/// k1 = 2 b hbar^2 (V - b x)V'' + b hbar^2 (2b - V')V' - 8 b V (V - b x)^2.
FirstIntegralSample check_first_integral_case_ii(const Potential1D& v1, double b, double hbar,
                                                 const std::vector<double>& xgrid);

/// W = (hbar/2) b1 P4' - (b/2) P4^2 - (b/2) x P4 - ((b/2) x^2 + hbar^2 K1 - hbar b1)/6.
Potential1D w_from_p4(std::shared_ptr<const specfun::SpecFunSolution> p4, double b, double hbar, double b1,
                      double K1);

/// Normalized residual of hbar^2 W'''' = 12 W W'' + 12 W'^2 + b x W' + 2 b W - b^2 x^2 / 6.
double w_equation_residual(const Potential1D& w, double b, double hbar, double x);

/// Y = (P2' + P2^2 + xi/2) / (2 beta), without checking the coupling of P2's alpha to beta.
Potential1D y_formula(std::shared_ptr<const specfun::SpecFunSolution> p2, double beta);

/// Y built from P2; requires alpha = -2 beta - 1/2 and Y != 0 on the validity interval.
Potential1D y_from_p2(std::shared_ptr<const specfun::SpecFunSolution> p2, double beta);

/// Normalized residual of Y'' = Y'^2/(2Y) + 4 beta Y^2 - xi Y - 1/(2Y).
double y_equation_residual(const Potential1D& y, double beta, double xi);

/// How the case ii quantum potential is built.
struct CaseIIRoute {
  enum class Kind { zero_k2, kappa };
  Kind kind = Kind::zero_k2;
  double kappa = 0.0;
  /// Initial data for P2 in its own variable.
  specfun::PainleveIC ic{};
};

/// V = a y + V1(x) from P2 with alpha = 0 (zero_k2) or from P2' + P2^2 (kappa), valid on `x_domain`.
SeparablePotential v_case_ii_quantum(double a, double b, double hbar, const CaseIIRoute& route,
                                     Interval x_domain);

}  // namespace sepint::implicit
