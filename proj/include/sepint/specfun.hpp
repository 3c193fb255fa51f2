#pragma once

// Weierstrass P and the Painleve transcendents P1, P2, P4 as validated numerical
// solutions of their defining second-order ODEs.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/jet.hpp"
#include "sepint/phasecore.hpp"

namespace sepint::specfun {

enum class Kind { weierstrass, p1, p2, p4 };

std::string to_string(Kind k);
/// Accepts "wp", "weierstrass", "p1", "p2", "p4".
Kind kind_from_string(const std::string& s);

struct PainleveIC {
  double x0 = 0.0;
  double y0 = 0.0;
  double yp0 = 0.0;
};

struct SpecParams {
  double wp_g2 = 0.0;
  double wp_g3 = 0.0;
  double alpha = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
};

/// Right-hand side F of y'' = F(x, y, y') for the given kind.
template <class T>
T rhs(Kind kind, const SpecParams& p, const T& x, const T& y, const T& yp) {
  switch (kind) {
    case Kind::weierstrass:
      return 6.0 * y * y - 0.5 * p.wp_g2;
    case Kind::p1:
      return 6.0 * y * y + x;
    case Kind::p2:
      return 2.0 * y * y * y + x * y + p.alpha;
    case Kind::p4:
      return yp * yp / (2.0 * y) - 1.5 * p.alpha * y * y * y - 2.0 * p.alpha * x * y * y -
             (0.5 * p.alpha * x * x + p.K1) * y + p.K2 / y;
  }
  return T(0.0);
}

/// Taylor jet of the ODE solution through (x, y, y'), obtained order by order from the ODE.
template <int N>
Jet<N> ode_jet(Kind kind, const SpecParams& p, double x, double y, double yp) {
  Jet<N> Y(y);
  if constexpr (N >= 1) Y[1] = yp;
  const Jet<N> X = Jet<N>::variable(x);
  for (int k = 0; k + 2 <= N; ++k) {
    const Jet<N> F = rhs(kind, p, X, Y, Y.differentiate());
    Y[static_cast<std::size_t>(k + 2)] = F[static_cast<std::size_t>(k)] / ((k + 1.0) * (k + 2.0));
  }
  return Y;
}

/// Order of the Taylor polynomials used for stepping and dense output.
inline constexpr int kTaylorOrder = 24;

class SpecFunSolution {
 public:
  struct Segment {
    double x0 = 0.0;
    double h = 0.0;  // signed extent; the segment covers x0 .. x0 + h
    std::array<double, kTaylorOrder + 1> c{};
  };

  /// `forward` segments start at `origin` and run to increasing x; `backward` ones to decreasing x.
  SpecFunSolution(Kind kind, SpecParams params, Interval validity, std::vector<double> poles, double origin,
                  std::vector<Segment> forward, std::vector<Segment> backward, bool zero_branch);

  Kind kind() const { return kind_; }
  const SpecParams& params() const { return params_; }
  /// Closed interval on which the dense evaluator is certified.
  const Interval& validity() const { return validity_; }
  const std::vector<double>& poles() const { return poles_; }
  bool is_zero_branch() const { return zero_branch_; }
  bool covers(double x) const { return x >= validity_.lo && x <= validity_.hi; }

  /// (value, first derivative); throws DomainError outside the validity interval.
  std::pair<double, double> eval(double x) const;
  double value(double x) const { return eval(x).first; }

  /// Taylor jet at x consistent with the defining ODE.
  template <int N>
  Jet<N> jet(double x) const {
    if (zero_branch_) {
      check_covered(x);
      return Jet<N>(0.0);
    }
    const auto [v, d] = eval(x);
    return ode_jet<N>(kind_, params_, x, v, d);
  }

  /// |y'' - F| / (1 + |F|) with y'' taken from the dense polynomial itself.
  double ode_residual(double x) const;

 private:
  void check_covered(double x) const;
  const Segment& locate(double x) const;

  Kind kind_;
  SpecParams params_;
  Interval validity_;
  std::vector<double> poles_;
  double origin_;
  std::shared_ptr<const std::vector<Segment>> forward_;
  std::shared_ptr<const std::vector<Segment>> backward_;
  bool zero_branch_;
};

/// Blow-up inside a requested interval; carries the truncated solution.
class PoleCollisionError : public Error {
 public:
  PoleCollisionError(const std::string& what, std::shared_ptr<const SpecFunSolution> partial)
      : Error(what), partial_(std::move(partial)) {}
  const SpecFunSolution& partial() const { return *partial_; }

 private:
  std::shared_ptr<const SpecFunSolution> partial_;
};

/// The initial condition blows up before a single step can be taken.
class ImmediatePoleError : public Error {
 public:
  using Error::Error;
};

/// A P4 solution with K2 != 0 reaches y = 0, where its ODE is singular.
class ZeroCrossingError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kSeedRadius = 1e-2;
inline constexpr double kBlowUp = 1e8;
inline constexpr double kPoleMargin = 1e-3;

/// Weierstrass P on an interval not containing 0 (at distance >= kSeedRadius).
SpecFunSolution weierstrass_p(Interval interval, double wp_g2, double wp_g3);
/// Laurent series of P around 0 (value and derivative), accurate for |x| <~ 0.1.
std::pair<double, double> weierstrass_laurent(double x, double wp_g2, double wp_g3);

SpecFunSolution painleve1(Interval interval, PainleveIC ic);
SpecFunSolution painleve2(Interval interval, double alpha, PainleveIC ic);
SpecFunSolution painleve4(Interval interval, double alpha, double K1, double K2, PainleveIC ic);
/// The exact solution P4 = 0 admitted when K2 = 0.
SpecFunSolution painleve4_zero_branch(Interval interval, double alpha, double K1);

/// Jets in x of P(s x) and of P'(s x), the prime meaning the derivative with respect to the
/// argument of P. Throws DomainError when s x leaves the validity interval.
std::pair<Jet<4>, Jet<4>> scaled_jets(const SpecFunSolution& sol, double s, double x);

/// Open x-interval mapped into the validity interval by x -> s x.
Interval scaled_domain(const SpecFunSolution& sol, double s);

/// Value and derivatives up to `order` (2..4); higher channels are NaN.
DerivStack derivative_tower(const SpecFunSolution& sol, double x, int order);

}  // namespace sepint::specfun
