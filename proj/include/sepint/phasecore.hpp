#pragma once

// Core types: parameters, phase states, one-dimensional potentials with
// derivative stacks, third-order integrals, and their classical evaluation.

#include <array>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/jet.hpp"

namespace sepint {

/// Named real parameters of a catalog entry.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::initializer_list<std::pair<const std::string, double>> init);

  /// Sets a value; rejects non-finite values, unknown names and negative hbar.
  ParamSet& set(const std::string& name, double value);
  bool has(const std::string& name) const { return values_.count(name) != 0; }
  /// Throws SchemaError when absent.
  double get(const std::string& name) const;
  double get_or(const std::string& name, double fallback) const;
  const std::map<std::string, double>& values() const { return values_; }

  static const std::vector<std::string>& recognized_names();
  static bool is_recognized(const std::string& name);

 private:
  std::map<std::string, double> values_;
};

struct PhaseState {
  double x = 0.0;
  double y = 0.0;
  double px = 0.0;
  double py = 0.0;
};

/// Value and the first four derivatives of a one-dimensional function.
struct DerivStack {
  std::array<double, 5> d{};
  double operator[](std::size_t n) const { return d[n]; }
  double& operator[](std::size_t n) { return d[n]; }
  double value() const { return d[0]; }
};

template <int N>
DerivStack stack_from_jet(const Jet<N>& j) {
  static_assert(N >= 4);
  DerivStack s;
  for (int n = 0; n <= 4; ++n) s.d[static_cast<std::size_t>(n)] = j.derivative(n);
  return s;
}

/// Open interval on which a one-dimensional function is defined.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
  double width() const { return hi - lo; }
};

/// A one-dimensional potential component with analytic derivative channels.
class Potential1D {
 public:
  using Evaluator = std::function<DerivStack(double)>;

  Potential1D();
  Potential1D(Evaluator eval, std::vector<double> singularities, std::string label, Interval domain = {});

  /// Builds from a generic callable f(T) instantiable with T = Jet<4>.
  template <class F>
  static Potential1D closed_form(std::string label, F f, std::vector<double> singularities = {},
                                 Interval domain = {}) {
    return Potential1D([f](double x) { return stack_from_jet(f(Jet<4>::variable(x))); },
                       std::move(singularities), std::move(label), domain);
  }
  static Potential1D zero();

  /// Evaluates the full stack. Throws SingularPointError on a declared singularity
  /// and DomainError outside the domain.
  DerivStack operator()(double x) const;
  double value(double x) const { return (*this)(x)[0]; }

  const std::vector<double>& singularities() const { return singularities_; }
  const std::string& label() const { return label_; }
  const Interval& domain() const { return domain_; }
  /// Distance from x to the closest singularity or domain edge.
  double clearance(double x) const;

 private:
  Evaluator eval_;
  std::vector<double> singularities_;
  std::string label_;
  Interval domain_;
};

struct SeparablePotential {
  Potential1D v1;
  Potential1D v2;
  double hbar = 0.0;

  double value(double x, double y) const { return v1.value(x) + v2.value(y); }
  double clearance(double x, double y) const;
};

/// The ten coefficients A_ijk of the cubic momentum part, i + j + k = 3, where i
/// counts powers of L = x py - y px and j, k count powers of px and py.
struct CoeffTensor {
  double a300 = 0.0;
  double a210 = 0.0;
  double a201 = 0.0;
  double a120 = 0.0;
  double a111 = 0.0;
  double a102 = 0.0;
  double a030 = 0.0;
  double a021 = 0.0;
  double a012 = 0.0;
  double a003 = 0.0;

  std::array<double, 10> as_array() const {
    return {a300, a210, a201, a120, a111, a102, a030, a021, a012, a003};
  }
  /// Exponents (i, j, k) of each slot of as_array().
  static const std::array<std::array<int, 3>, 10>& exponents();
  bool is_zero() const;
  /// True when no coefficient multiplies a power of L.
  bool is_l_free() const { return a300 == 0 && a210 == 0 && a201 == 0 && a120 == 0 && a111 == 0 && a102 == 0; }
  CoeffTensor scaled(double s) const;
};

struct FieldValue {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

using Field2D = std::function<FieldValue(double, double)>;

/// The channel V^(n) of a potential lifted to a Dual2 argument.
class Channel {
 public:
  Channel(const DerivStack& s, const Dual2& arg) : s_(s), arg_(arg) {}
  /// n-th derivative as a function of (x, y); needs n <= 3.
  Dual2 operator()(int n) const;

 private:
  DerivStack s_;
  Dual2 arg_;
};

struct CorrectionFields {
  Field2D g1;
  Field2D g2;
  /// Lines x = s and y = s on which the fields are singular.
  std::vector<double> singular_x;
  std::vector<double> singular_y;
  /// True when both fields are identically zero by construction.
  bool trivial = false;
};

/// Field from f(Dual2 x, Dual2 y).
template <class F>
Field2D make_field(F f) {
  return [f](double x, double y) {
    const Dual2 r = f(Dual2::x_variable(x), Dual2::y_variable(y));
    return FieldValue{r.v, r.dx, r.dy};
  };
}

/// Field from f(Dual2 x, Dual2 y, Channel v1, Channel v2) reading the potential's derivatives.
template <class F>
Field2D make_field(const SeparablePotential& pot, F f) {
  return [f, v1 = pot.v1, v2 = pot.v2](double x, double y) {
    const Dual2 X = Dual2::x_variable(x);
    const Dual2 Y = Dual2::y_variable(y);
    const Dual2 r = f(X, Y, Channel(v1(x), X), Channel(v2(y), Y));
    return FieldValue{r.v, r.dx, r.dy};
  };
}

Field2D zero_field();
CorrectionFields zero_corrections();

struct ThirdOrderIntegral {
  CoeffTensor coeffs;
  CorrectionFields corrections;
  std::string label;

  /// Checks the non-triviality invariant.
  void validate() const;
};

struct FPolynomials {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
};

FPolynomials eval_f_polynomials(const CoeffTensor& A, double x, double y);

/// Partial derivatives of the f-polynomials used by the linear compatibility condition.
struct FPolyPartials {
  double f1yy = 0.0;
  double f2y = 0.0, f2xy = 0.0, f2yy = 0.0;
  double f3x = 0.0, f3xx = 0.0, f3xy = 0.0;
  double f4xx = 0.0;
};

FPolyPartials eval_f_partials(const CoeffTensor& A, double x, double y);

/// Throws SingularPointError if (x, y) lies on a declared singular line of the fields.
void require_regular(const CorrectionFields& g, double x, double y);

/// Classical value: 2 sum A_ijk L^i px^j py^k + 2 g1 px + 2 g2 py.
double eval_integral_classical(const ThirdOrderIntegral& integral, const PhaseState& s);

/// Time derivative of X along Hamilton's flow, dX/dt = {X, H}.
double poisson_bracket_residual(const ThirdOrderIntegral& integral, const SeparablePotential& potential,
                                const PhaseState& s);

/// Magnitude scale of the terms entering poisson_bracket_residual, used to normalize it.
double poisson_bracket_scale(const ThirdOrderIntegral& integral, const SeparablePotential& potential,
                             const PhaseState& s);

double hamiltonian(const SeparablePotential& potential, const PhaseState& s);

}  // namespace sepint
