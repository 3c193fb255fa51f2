#pragma once

// Truncated Taylor arithmetic.
//
// Jet<N> carries the normalized Taylor coefficients c_k = f^(k)(x0) / k! of a
// univariate function up to order N; arithmetic propagates them exactly (up to
// rounding). Dual2 carries a value and its gradient with respect to two
// independent variables. Both are drop-in scalar types for generic lambdas
// that are also instantiated with double.

#include <array>
#include <cmath>
#include <cstddef>

namespace sepint {

template <int N>
class Jet {
  static_assert(N >= 0);

 public:
  static constexpr int order = N;

  constexpr Jet() = default;
  constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT: implicit by design of generic lambdas

  /// The identity function x around x0.
  static constexpr Jet variable(double x0, double slope = 1.0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c_[1] = slope;
    return j;
  }

  constexpr double& operator[](std::size_t k) { return c_[k]; }
  constexpr double operator[](std::size_t k) const { return c_[k]; }
  constexpr double value() const { return c_[0]; }
  const std::array<double, N + 1>& coefficients() const { return c_; }

  /// k-th derivative at the expansion point.
  double derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c_[static_cast<std::size_t>(k)] * fact;
  }

  /// Derivative of the represented series, truncated to order N - 1 (top coefficient zero).
  Jet differentiate() const {
    Jet d;
    for (int k = 0; k < N; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
  }

  /// Leading M + 1 coefficients (M <= N).
  template <int M>
  Jet<M> truncated() const {
    static_assert(M <= N);
    Jet<M> r;
    for (int k = 0; k <= M; ++k) r[static_cast<std::size_t>(k)] = c_[k];
    return r;
  }

  /// Substitutes t -> s * t, i.e. the jet of f(s * t).
  Jet scaled(double s) const {
    Jet r;
    double p = 1.0;
    for (int k = 0; k <= N; ++k, p *= s) r.c_[k] = c_[k] * p;
    return r;
  }

  /// Horner evaluation of the truncated polynomial at offset t.
  double eval(double t) const {
    double acc = c_[N];
    for (int k = N - 1; k >= 0; --k) acc = acc * t + c_[k];
    return acc;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= N; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) {
    Jet r;
    for (int k = 0; k <= N; ++k) r.c_[k] = -a.c_[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    const double b0 = b.c_[0];
    for (int k = 0; k <= N; ++k) {
      double s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
      q.c_[k] = s / b0;
    }
    return q;
  }

  friend Jet operator+(Jet a, double b) { return a.c_[0] += b, a; }
  friend Jet operator+(double b, Jet a) { return a.c_[0] += b, a; }
  friend Jet operator-(Jet a, double b) { return a.c_[0] -= b, a; }
  friend Jet operator-(double b, const Jet& a) { return Jet(b) - a; }
  friend Jet operator*(Jet a, double b) {
    for (auto& v : a.c_) v *= b;
    return a;
  }
  friend Jet operator*(double b, Jet a) { return a * b; }
  friend Jet operator/(Jet a, double b) {
    for (auto& v : a.c_) v /= b;
    return a;
  }
  friend Jet operator/(double b, const Jet& a) { return Jet(b) / a; }

  friend Jet sqrt(const Jet& a) {
    Jet s;
    s.c_[0] = std::sqrt(a.c_[0]);
    for (int k = 1; k <= N; ++k) {
      double acc = a.c_[k];
      for (int j = 1; j < k; ++j) acc -= s.c_[j] * s.c_[k - j];
      s.c_[k] = acc / (2.0 * s.c_[0]);
    }
    return s;
  }

 private:
  std::array<double, N + 1> c_{};
};

/// Integer power by repeated squaring; valid for double and Jet alike.
template <class T>
T ipow(const T& base, int n) {
  if (n < 0) return T(1.0) / ipow(base, -n);
  T result(1.0);
  T b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n > 0) b = b * b;
  }
  return result;
}

/// Value with gradient with respect to (x, y).
struct Dual2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  constexpr Dual2() = default;
  constexpr Dual2(double constant) : v(constant) {}  // NOLINT
  constexpr Dual2(double value, double ddx, double ddy) : v(value), dx(ddx), dy(ddy) {}

  static constexpr Dual2 x_variable(double x) { return {x, 1.0, 0.0}; }
  static constexpr Dual2 y_variable(double y) { return {y, 0.0, 1.0}; }

  friend constexpr Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
  friend constexpr Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
  friend constexpr Dual2 operator-(const Dual2& a) { return {-a.v, -a.dx, -a.dy}; }
  friend constexpr Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
  }
  friend constexpr Dual2 operator/(const Dual2& a, const Dual2& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.dx - q * b.dx) * inv, (a.dy - q * b.dy) * inv};
  }
  friend Dual2 sqrt(const Dual2& a) {
    const double s = std::sqrt(a.v);
    return {s, a.dx / (2.0 * s), a.dy / (2.0 * s)};
  }
};

}  // namespace sepint
