#include "sepint/detsolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

namespace sepint::detsolve {

namespace {

template <class T>
struct FPoly {
  T f1, f2, f3, f4;
};

template <class T>
FPoly<T> fpolys(const CoeffTensor& A, const T& x, const T& y) {
  return {-A.a300 * y * y * y + A.a210 * y * y - A.a120 * y + A.a030,
          3.0 * A.a300 * x * y * y - 2.0 * A.a210 * x * y + A.a201 * y * y + A.a120 * x - A.a111 * y + A.a021,
          -3.0 * A.a300 * x * x * y + A.a210 * x * x - 2.0 * A.a201 * x * y + A.a111 * x - A.a102 * y + A.a012,
          A.a300 * x * x * x + A.a201 * x * x + A.a102 * x + A.a003};
}

DerivStack stack_checked(const Potential1D& v, double t, int order) {
  DerivStack s = v(t);
  for (int n = 0; n <= order; ++n)
    if (!std::isfinite(s[static_cast<std::size_t>(n)])) {
      std::ostringstream msg;
      msg << "derivative of order " << n << " of " << v.label() << " unavailable at " << t;
      throw DerivativeUnavailableError(msg.str());
    }
  return s;
}

void require_margin(const std::vector<double>& lines, double t, double margin, const char* axis) {
  for (double s : lines)
    if (std::abs(t - s) < margin) {
      std::ostringstream msg;
      msg << "grid node " << axis << " = " << t << " lies within " << margin << " of the singular line " << axis
          << " = " << s;
      throw SingularPointError(msg.str());
    }
}

struct Accum {
  double max_abs = 0.0, sumsq = 0.0, raw = 0.0, scale = 0.0;
  std::size_t n = 0;
  void add(double r, double s) {
    const double q = std::abs(r) / (1.0 + s);
    max_abs = std::max(max_abs, q);
    sumsq += q * q;
    raw = std::max(raw, std::abs(r));
    scale = std::max(scale, s);
    ++n;
  }
  void merge(const Accum& o) {
    max_abs = std::max(max_abs, o.max_abs);
    sumsq += o.sumsq;
    raw = std::max(raw, o.raw);
    scale = std::max(scale, o.scale);
    n += o.n;
  }
};

/// Evaluates `node(x, y, r, s)` over the grid rows in parallel and reduces per equation.
template <class Node>
ResidualReport sweep(const std::vector<std::string>& names, const GridSpec& grid, Node node, double tolerance) {
  if (grid.nx < 1 || grid.ny < 1) throw PreconditionError("grid needs at least one node per axis");
  const std::size_t k = names.size();
  const int workers = std::max(1, std::min<int>(grid.ny, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::future<std::vector<Accum>>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      std::vector<Accum> acc(k);
      std::vector<double> r(k), s(k);
      for (int j = w; j < grid.ny; j += workers)
        for (int i = 0; i < grid.nx; ++i) {
          node(grid.xs(i), grid.ys(j), r.data(), s.data());
          for (std::size_t e = 0; e < k; ++e) acc[e].add(r[e], s[e]);
        }
      return acc;
    }));
  }
  std::vector<Accum> total(k);
  for (auto& j : jobs) {
    const auto part = j.get();
    for (std::size_t e = 0; e < k; ++e) total[e].merge(part[e]);
  }
  ResidualReport rep;
  rep.tolerance = tolerance;
  for (std::size_t e = 0; e < k; ++e) {
    EquationResidual q{names[e], total[e].max_abs,
                       total[e].n ? std::sqrt(total[e].sumsq / static_cast<double>(total[e].n)) : 0.0, total[e].raw,
                       total[e].scale, total[e].n};
    rep.pass = rep.pass && q.max_abs <= tolerance;
    rep.equations.push_back(q);
  }
  return rep;
}

double amax(std::initializer_list<double> v) {
  double m = 0.0;
  for (double t : v) m = std::max(m, std::abs(t));
  return m;
}

}  // namespace

const EquationResidual& ResidualReport::at(const std::string& name) const {
  for (const auto& e : equations)
    if (e.name == name) return e;
  throw PreconditionError("report has no equation " + name);
}

double ResidualReport::max_abs() const {
  double m = 0.0;
  for (const auto& e : equations) m = std::max(m, e.max_abs);
  return m;
}

ResidualReport residual_determining(const SeparablePotential& pot, const ThirdOrderIntegral& integral,
                                    const GridSpec& grid, double tolerance) {
  const CoeffTensor& A = integral.coeffs;
  const CorrectionFields& g = integral.corrections;
  const double q = 0.25 * pot.hbar * pot.hbar;
  auto node = [&](double x, double y, double* r, double* s) {
    require_margin(pot.v1.singularities(), x, grid.margin, "x");
    require_margin(g.singular_x, x, grid.margin, "x");
    require_margin(pot.v2.singularities(), y, grid.margin, "y");
    require_margin(g.singular_y, y, grid.margin, "y");
    const DerivStack s1 = stack_checked(pot.v1, x, 3), s2 = stack_checked(pot.v2, y, 3);
    const auto f = fpolys(A, x, y);
    const FieldValue g1 = g.g1(x, y), g2 = g.g2(x, y);
    const double V1 = s1[1], V2 = s2[1];
    // value equation
    const double t1 = g1.value * V1, t2 = g2.value * V2;
    const double t3 = q * f.f1 * s1[3], t4 = q * f.f4 * s2[3];
    const double t5 = q * 8.0 * A.a300 * x * V2, t6 = -q * 8.0 * A.a300 * y * V1;
    const double t7 = q * 2.0 * A.a210 * V1, t8 = q * 2.0 * A.a201 * V2;
    r[0] = t1 + t2 - (t3 + t4 + t5 + t6 + t7 + t8);
    s[0] = amax({t1, t2, t3, t4, t5, t6, t7, t8});
    // first-order equations
    const double u1 = 3.0 * f.f1 * V1, u2 = f.f2 * V2;
    r[1] = g1.dx - (u1 + u2);
    s[1] = amax({g1.dx, u1, u2});
    const double w1 = f.f3 * V1, w2 = 3.0 * f.f4 * V2;
    r[2] = g2.dy - (w1 + w2);
    s[2] = amax({g2.dy, w1, w2});
    // mixed equation
    const double m1 = 2.0 * f.f2 * V1, m2 = 2.0 * f.f3 * V2;
    r[3] = g1.dy + g2.dx - (m1 + m2);
    s[3] = amax({g1.dy, g2.dx, m1, m2});
  };
  return sweep({"eq7", "eq8", "eq9", "eq10"}, grid, node, tolerance);
}

ResidualReport residual_linear_compat(const SeparablePotential& pot, const CoeffTensor& A, const GridSpec& grid,
                                      double tolerance) {
  auto node = [&](double x, double y, double* r, double* s) {
    require_margin(pot.v1.singularities(), x, grid.margin, "x");
    require_margin(pot.v2.singularities(), y, grid.margin, "y");
    const DerivStack s1 = stack_checked(pot.v1, x, 3), s2 = stack_checked(pot.v2, y, 3);
    const FPolynomials f = eval_f_polynomials(A, x, y);
    const FPolyPartials d = eval_f_partials(A, x, y);
    const double t[] = {
        -f.f3 * s1[3],
        -f.f2 * s2[3],
        2.0 * (d.f2y - d.f3x) * s1[2],
        2.0 * (-d.f2y + d.f3x) * s2[2],
        (-3.0 * d.f1yy + 2.0 * d.f2xy - d.f3xx) * s1[1],
        (-d.f2yy + 2.0 * d.f3xy - 3.0 * d.f4xx) * s2[1],
    };
    r[0] = t[0] + t[1] + t[2] + t[3] + t[4] + t[5];
    s[0] = amax({t[0], t[1], t[2], t[3], t[4], t[5]});
  };
  return sweep({"eq6"}, grid, node, tolerance);
}

namespace {

ResidualReport ode_sweep(const std::string& name, const std::vector<double>& ts, double tolerance,
                         const std::function<void(double, double*, double*)>& node) {
  Accum acc;
  for (double t : ts) {
    double r = 0.0, s = 0.0;
    node(t, &r, &s);
    acc.add(r, s);
  }
  ResidualReport rep;
  rep.tolerance = tolerance;
  EquationResidual q{name, acc.max_abs, acc.n ? std::sqrt(acc.sumsq / static_cast<double>(acc.n)) : 0.0, acc.raw,
                     acc.scale, acc.n};
  rep.pass = q.max_abs <= tolerance;
  rep.equations.push_back(q);
  return rep;
}

}  // namespace

ResidualReport ode_residual_11(const Potential1D& v1, double A210, double A111, double A012, double rhs_a,
                               double rhs_b, const std::vector<double>& xs, double tolerance) {
  return ode_sweep("eq11", xs, tolerance, [&](double x, double* r, double* s) {
    const DerivStack d = stack_checked(v1, x, 3);
    const double t1 = (A210 * x * x + A111 * x + A012) * d[3];
    const double t2 = 4.0 * (2.0 * A210 * x + A111) * d[2];
    const double t3 = 12.0 * A210 * d[1];
    const double t4 = rhs_a * x + rhs_b;
    *r = t1 + t2 + t3 - t4;
    *s = amax({t1, t2, t3, t4});
  });
}

ResidualReport ode_residual_12(const Potential1D& v2, double A201, double A111, double A021, double rhs_a,
                               double rhs_b, const std::vector<double>& ys, double tolerance) {
  return ode_sweep("eq12", ys, tolerance, [&](double y, double* r, double* s) {
    const DerivStack d = stack_checked(v2, y, 3);
    const double t1 = (A201 * y * y - A111 * y + A021) * d[3];
    const double t2 = 4.0 * (2.0 * A201 * y - A111) * d[2];
    const double t3 = 12.0 * A201 * d[1];
    const double t4 = rhs_a * y + rhs_b;
    *r = t1 + t2 + t3 - t4;
    *s = amax({t1, t2, t3, t4});
  });
}

std::string to_string(Family f) { return "A." + std::to_string(static_cast<int>(f) + 1); }

Family family_from_string(const std::string& s) {
  for (int k = 0; k < 7; ++k) {
    const auto f = static_cast<Family>(k);
    if (s == to_string(f) || s == "A" + std::to_string(k + 1)) return f;
  }
  throw SchemaError("unknown family '" + s + "'");
}

Potential1D family_potential(Family f, const FamilyParams& p) {
  const double al = p.alpha, c1 = p.c1, c2 = p.c2, c3 = p.c3, c4 = p.c4;
  switch (f) {
    case Family::A1:
      return Potential1D::closed_form(
          "c1/(x + alpha)^2 + c2/(x - alpha)^2 + c3 x^2 + c4 x",
          [=](auto x) { return c1 / ((x + al) * (x + al)) + c2 / ((x - al) * (x - al)) + c3 * x * x + c4 * x; },
          {-al, al});
    case Family::A2:
      return Potential1D::closed_form(
          "c1/x^2 + c2/x^3 + c3 x^2 + c4 x",
          [=](auto x) { return c1 / (x * x) + c2 / (x * x * x) + c3 * x * x + c4 * x; }, {0.0});
    case Family::A3:
      return Potential1D::closed_form(
          "c1/x^2 + c2 x^3 + c3 x^2 + c4 x",
          [=](auto x) { return c1 / (x * x) + c2 * x * x * x + c3 * x * x + c4 * x; }, {0.0});
    case Family::A4:
      return Potential1D::closed_form("c1 x^4 + c2 x^2 + c3 x",
                                      [=](auto x) { return c1 * x * x * x * x + c2 * x * x + c3 * x; });
    case Family::A5:
      return Potential1D::closed_form("c1 x^3 + c2 x", [=](auto x) { return c1 * x * x * x + c2 * x; });
    case Family::A6:
      return Potential1D::closed_form("c1 x^2", [=](auto x) { return c1 * x * x; });
    case Family::A7:
      return Potential1D::closed_form("c1 x", [=](auto x) { return c1 * x; });
  }
  throw SchemaError("unknown family");
}

FitResult fit_homogeneous_family(Family f, const FamilyParams& p, double A210, double A111, double A012,
                                 const std::vector<double>& xs) {
  const auto tol = [](double u, double v) { return std::abs(u - v) <= 1e-12 * (1.0 + std::abs(u) + std::abs(v)); };
  bool ok = true;
  switch (f) {
    case Family::A1:
      ok = A210 != 0.0 && A111 == 0.0 && tol(A012, -A210 * p.alpha * p.alpha);
      break;
    case Family::A2:
      ok = A210 != 0.0 && A111 == 0.0 && A012 == 0.0;
      break;
    case Family::A3:
      ok = A210 == 0.0 && A111 != 0.0 && A012 == 0.0;
      break;
    case Family::A4:
      ok = A210 == 0.0 && A111 == 0.0 && A012 != 0.0;
      break;
    case Family::A5:
      ok = A210 == 0.0;
      break;
    case Family::A6:
    case Family::A7:
      break;
  }
  if (!ok) throw ConfigMismatchError("coefficient configuration does not match family " + to_string(f));
  if (xs.size() < 2) throw PreconditionError("family fit needs at least two abscissae");
  const Potential1D v = family_potential(f, p);
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd M(n, 2);
  Eigen::VectorXd lhs(n);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    const DerivStack d = stack_checked(v, x, 3);
    lhs(i) = (A210 * x * x + A111 * x + A012) * d[3] + 4.0 * (2.0 * A210 * x + A111) * d[2] + 12.0 * A210 * d[1];
    M(i, 0) = x;
    M(i, 1) = 1.0;
    scale = std::max(scale, std::abs(lhs(i)));
  }
  const Eigen::Vector2d ab = M.colPivHouseholderQr().solve(lhs);
  FitResult out{ab(0), ab(1), 0.0};
  out.residual = (lhs - M * ab).cwiseAbs().maxCoeff() / (1.0 + scale);
  return out;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a);
  return gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-12);
}

void require_path(const std::vector<double>& lines, double a, double b, const char* axis) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  for (double s : lines)
    if (s >= lo && s <= hi) {
      std::ostringstream msg;
      msg << "quadrature path " << axis << " in [" << lo << ", " << hi << "] crosses the singular line " << axis
          << " = " << s;
      throw DomainError(msg.str());
    }
}

/// Quadrature state shared by the reconstructed field closures.
struct Reconstruction {
  SeparablePotential pot;
  CoeffTensor A;
  double x0, y0;

  struct Local {
    double I1, I2, R, k, h;
  };
  Local local(double x, double y) const {
    const DerivStack s1 = pot.v1(x), s2 = pot.v2(y);
    const auto f = fpolys(A, Dual2::x_variable(x), Dual2::y_variable(y));
    const double V1 = s1[1], V2 = s2[1];
    Local l;
    l.I1 = 3.0 * f.f1.v * V1 + f.f2.v * V2;
    l.I2 = f.f3.v * V1 + 3.0 * f.f4.v * V2;
    l.R = 2.0 * (f.f2.v * V1 + f.f3.v * V2);
    l.k = 3.0 * f.f1.dy * V1 + f.f2.dy * V2 + f.f2.v * s2[2];
    l.h = f.f3.dx * V1 + f.f3.v * s1[2] + 3.0 * f.f4.dx * V2;
    return l;
  }
  void check(double x, double y) const {
    require_path(pot.v1.singularities(), x0, x, "x");
    require_path(pot.v2.singularities(), y0, y, "y");
  }
  FieldValue g1(double x, double y) const {
    check(x, y);
    const double along = integrate([&](double s) { return local(s, y).I1; }, x0, x);
    const double phi = integrate([&](double t) { return local(x0, t).R; }, y0, y) -
                       integrate([&](double t) { return (y - t) * local(x0, t).h; }, y0, y);
    const double dphi = local(x0, y).R - integrate([&](double t) { return local(x0, t).h; }, y0, y);
    const double dy = integrate([&](double s) { return local(s, y).k; }, x0, x) + dphi;
    return {along + phi, local(x, y).I1, dy};
  }
  FieldValue g2(double x, double y) const {
    check(x, y);
    const double R00 = local(x0, y0).R;
    const double along = integrate([&](double t) { return local(x, t).I2; }, y0, y);
    const double psi = integrate([&](double s) { return local(s, y0).R - R00; }, x0, x) -
                       integrate([&](double s) { return (x - s) * local(s, y0).k; }, x0, x);
    const double dpsi = local(x, y0).R - R00 - integrate([&](double s) { return local(s, y0).k; }, x0, x);
    const double dx = integrate([&](double t) { return local(x, t).h; }, y0, y) + dpsi;
    return {along + psi, dx, local(x, y).I2};
  }
};

}  // namespace

QuadratureResult solve_g_quadrature(const SeparablePotential& pot, const CoeffTensor& A,
                                    std::pair<double, double> anchor, const GridSpec& grid, double tolerance) {
  auto rec = std::make_shared<const Reconstruction>(Reconstruction{pot, A, anchor.first, anchor.second});
  const double x0 = anchor.first, y0 = anchor.second;
  // Raw fields, then the constants left free by the first-order and mixed equations, fitted on the value equation.
  const double q = 0.25 * pot.hbar * pot.hbar;
  const auto n = static_cast<Eigen::Index>(grid.nx) * grid.ny;
  Eigen::MatrixXd M(n, 3);
  Eigen::VectorXd rhs(n);
  const auto fill_row = [&](int i, int j) {
    const Eigen::Index row = static_cast<Eigen::Index>(j) * grid.nx + i;
    const double x = grid.xs(i), y = grid.ys(j);
    require_margin(pot.v1.singularities(), x, grid.margin, "x");
    require_margin(pot.v2.singularities(), y, grid.margin, "y");
    const DerivStack s1 = stack_checked(pot.v1, x, 3), s2 = stack_checked(pot.v2, y, 3);
    const auto f = fpolys(A, x, y);
    const double V1 = s1[1], V2 = s2[1];
    const double G1 = rec->g1(x, y).value, G2 = rec->g2(x, y).value;
    const double Q =
        q * (f.f1 * s1[3] + f.f4 * s2[3] + 8.0 * A.a300 * (x * V2 - y * V1) + 2.0 * (A.a210 * V1 + A.a201 * V2));
    const double r0 = G1 * V1 + G2 * V2 - Q;
    const double w = 1.0 / (1.0 + amax({G1 * V1, G2 * V2, Q}));
    M(row, 0) = w * V1;
    M(row, 1) = w * V2;
    M(row, 2) = w * ((x - x0) * V2 - (y - y0) * V1);
    rhs(row) = -w * r0;
  };
  {
    const int workers = std::max(1, std::min<int>(grid.ny, static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (int j = w; j < grid.ny; j += workers)
          for (int i = 0; i < grid.nx; ++i) fill_row(i, j);
      }));
    for (auto& j : jobs) j.get();
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  cod.setThreshold(1e-10);
  const Eigen::Vector3d k = cod.solve(rhs);
  QuadratureResult out;
  out.k1 = k(0);
  out.k2 = k(1);
  out.c = k(2);
  const double k1 = out.k1, k2 = out.k2, c = out.c;
  out.fields.g1 = [rec, k1, c, y0](double x, double y) {
    FieldValue g = rec->g1(x, y);
    return FieldValue{g.value + k1 - c * (y - y0), g.dx, g.dy - c};
  };
  out.fields.g2 = [rec, k2, c, x0](double x, double y) {
    FieldValue g = rec->g2(x, y);
    return FieldValue{g.value + k2 + c * (x - x0), g.dx + c, g.dy};
  };
  out.fields.singular_x = pot.v1.singularities();
  out.fields.singular_y = pot.v2.singularities();
  ThirdOrderIntegral t{A, out.fields, "reconstructed"};
  out.report = residual_determining(pot, t, grid, tolerance);
  out.feasible = out.report.pass;
  if (!out.feasible) {
    for (const auto& e : out.report.equations)
      if (e.max_abs > tolerance) {
        out.violating = e.name;
        break;
      }
  }
  return out;
}

std::vector<long double> central_weights(int m, int r) {
  // Fornberg: weights for derivatives 0..m at offsets -r..r, evaluated at 0.
  const int N = 2 * r + 1;
  if (m < 0 || r < 0 || m >= N) throw PreconditionError("stencil too small for the derivative order");
  std::vector<long double> z(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) z[static_cast<std::size_t>(i)] = i - r;
  std::vector<std::vector<long double>> c(static_cast<std::size_t>(N),
                                          std::vector<long double>(static_cast<std::size_t>(m + 1), 0.0L));
  long double c1 = 1.0L, c4 = z[0];
  c[0][0] = 1.0L;
  for (int i = 1; i < N; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const int mn = std::min(i, m);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = z[iu];
    for (int j = 0; j < i; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const long double c3 = z[iu] - z[ju];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          const auto ku = static_cast<std::size_t>(k);
          c[iu][ku] = c1 * (k * c[iu - 1][ku - 1] - c5 * c[iu - 1][ku]) / c2;
        }
        c[iu][0] = -c1 * c5 * c[iu - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        c[ju][ku] = (c4 * c[ju][ku] - k * c[ju][ku - 1]) / c3;
      }
      c[ju][0] = c4 * c[ju][0] / c3;
    }
    c1 = c2;
  }
  std::vector<long double> w(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
  return w;
}

namespace {

int half_width(int m, int order) { return m == 0 ? 0 : (m + 1) / 2 - 1 + order / 2; }

/// Long double field on an index box [i0, i1) x [j0, j1) of the padded lattice.
struct Lattice {
  int nx = 0, ny = 0;
  std::vector<long double> v;
  long double& at(int i, int j) { return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)]; }
  long double at(int i, int j) const {
    return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)];
  }
};

}  // namespace

OracleResult commutator_oracle(const SeparablePotential& pot, const ThirdOrderIntegral& integral,
                               const GaussianTest& psi, const GridSpec& grid, int order) {
  if (!(pot.hbar > 0.0))
    throw PreconditionError("the commutator oracle is quantum only; use the Poisson bracket for hbar = 0");
  if (!integral.coeffs.is_l_free())
    throw PreconditionError("the commutator oracle needs an integral without powers of L");
  if (order < 2 || order % 2 != 0) throw PreconditionError("stencil order must be even and >= 2");
  if (grid.nx < 1 || grid.ny < 1) throw PreconditionError("oracle grid needs nodes");
  const double hx = grid.nx > 1 ? (grid.x.hi - grid.x.lo) / (grid.nx - 1) : 1.0;
  const double hy = grid.ny > 1 ? (grid.y.hi - grid.y.lo) / (grid.ny - 1) : 1.0;
  const long double hb = pot.hbar;
  const CoeffTensor& A = integral.coeffs;

  std::vector<std::array<int, 2>> terms;
  std::vector<long double> amps;
  for (const auto& [jx, ky, a] : std::vector<std::tuple<int, int, double>>{
           {3, 0, A.a030}, {2, 1, A.a021}, {1, 2, A.a012}, {0, 3, A.a003}}) {
    if (a != 0.0) {
      terms.push_back({jx, ky});
      amps.push_back(2.0L * hb * hb * hb * a);
    }
  }
  int rd = half_width(1, order);
  for (const auto& t : terms) rd = std::max({rd, half_width(t[0], order), half_width(t[1], order)});
  const int rh = half_width(2, order);
  const int G = rd + rh;
  const int NX = grid.nx + 2 * G, NY = grid.ny + 2 * G;
  const auto X = [&](int i) { return grid.x.lo + (i - G) * hx; };
  const auto Y = [&](int j) { return grid.y.lo + (j - G) * hy; };

  std::vector<std::vector<long double>> w(4);
  for (int m = 1; m <= 3; ++m) w[static_cast<std::size_t>(m)] = central_weights(m, half_width(m, order));

  Lattice P{NX, NY, std::vector<long double>(static_cast<std::size_t>(NX) * NY)};
  std::vector<long double> V1(static_cast<std::size_t>(NX)), V2(static_cast<std::size_t>(NY));
  for (int i = 0; i < NX; ++i) V1[static_cast<std::size_t>(i)] = pot.v1.value(X(i));
  for (int j = 0; j < NY; ++j) V2[static_cast<std::size_t>(j)] = pot.v2.value(Y(j));
  const long double s2 = 2.0L * psi.sigma * psi.sigma;
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) {
      const long double dx = X(i) - psi.x0, dy = Y(j) - psi.y0;
      P.at(i, j) = std::exp(-(dx * dx + dy * dy) / s2);
    }

  const auto deriv = [&](const Lattice& f, int i, int j, int mx, int my) {
    const int rx = half_width(mx, order), ry = half_width(my, order);
    long double acc = 0.0L;
    for (int a = -rx; a <= rx; ++a) {
      const long double wa = mx == 0 ? 1.0L : w[static_cast<std::size_t>(mx)][static_cast<std::size_t>(a + rx)];
      if (wa == 0.0L) continue;
      for (int b = -ry; b <= ry; ++b) {
        const long double wb = my == 0 ? 1.0L : w[static_cast<std::size_t>(my)][static_cast<std::size_t>(b + ry)];
        acc += wa * wb * f.at(i + a, j + b);
      }
    }
    return acc / (std::pow(static_cast<long double>(hx), mx) * std::pow(static_cast<long double>(hy), my));
  };
  const auto applyD = [&](const Lattice& f, int i, int j) {
    long double acc = 0.0L;
    for (std::size_t t = 0; t < terms.size(); ++t) acc += amps[t] * deriv(f, i, j, terms[t][0], terms[t][1]);
    const FieldValue g1 = integral.corrections.g1(X(i), Y(j));
    const FieldValue g2 = integral.corrections.g2(X(i), Y(j));
    acc -= hb * (2.0L * g1.value * deriv(f, i, j, 1, 0) + g1.dx * f.at(i, j) + 2.0L * g2.value * deriv(f, i, j, 0, 1) +
                 g2.dy * f.at(i, j));
    return acc;
  };
  const auto applyH = [&](const Lattice& f, int i, int j) {
    return -0.5L * hb * hb * (deriv(f, i, j, 2, 0) + deriv(f, i, j, 0, 2)) +
           (V1[static_cast<std::size_t>(i)] + V2[static_cast<std::size_t>(j)]) * f.at(i, j);
  };

  Lattice DP{NX, NY, std::vector<long double>(static_cast<std::size_t>(NX) * NY, 0.0L)};
  Lattice HP = DP;
  for (int i = G - rh; i < G + grid.nx + rh; ++i)
    for (int j = G - rh; j < G + grid.ny + rh; ++j) DP.at(i, j) = applyD(P, i, j);
  for (int i = G - rd; i < G + grid.nx + rd; ++i)
    for (int j = G - rd; j < G + grid.ny + rd; ++j) HP.at(i, j) = applyH(P, i, j);
  long double num = 0.0L, den = 0.0L;
  for (int i = G; i < G + grid.nx; ++i)
    for (int j = G; j < G + grid.ny; ++j) {
      const long double r = applyH(DP, i, j) - applyD(HP, i, j);
      // trapezoid weights, so the ratio approximates the continuous norm
      const long double wt = ((i == G || i == G + grid.nx - 1) ? 0.5L : 1.0L) * ((j == G || j == G + grid.ny - 1) ? 0.5L : 1.0L);
      num += wt * r * r;
      den += wt * P.at(i, j) * P.at(i, j);
    }
  OracleResult out;
  out.norm = static_cast<double>(std::sqrt(num / den));
  out.h = std::max(hx, hy);
  out.coarse_warning = out.h > 0.5 * psi.sigma;
  return out;
}

ConvergenceStudy commutator_convergence(const SeparablePotential& pot, const ThirdOrderIntegral& integral,
                                        const GaussianTest& psi, Interval xr, Interval yr, double h0, int levels,
                                        int order) {
  if (levels < 1 || !(h0 > 0.0)) throw PreconditionError("convergence study needs h0 > 0 and levels >= 1");
  ConvergenceStudy out;
  double h = h0;
  for (int l = 0; l < levels; ++l, h *= 0.5) {
    GridSpec g;
    g.x = xr;
    g.y = yr;
    g.nx = static_cast<int>(std::lround(xr.width() / h)) + 1;
    g.ny = static_cast<int>(std::lround(yr.width() / h)) + 1;
    g.x.hi = g.x.lo + (g.nx - 1) * h;
    g.y.hi = g.y.lo + (g.ny - 1) * h;
    const OracleResult r = commutator_oracle(pot, integral, psi, g, order);
    out.h.push_back(r.h);
    out.residual.push_back(r.norm);
  }
  for (std::size_t k = 1; k < out.residual.size(); ++k)
    out.observed_order.push_back(std::log2(out.residual[k - 1] / out.residual[k]));
  const std::size_t n = out.residual.size();
  out.limit = out.residual.back();
  if (n >= 3) {
    const double r1 = out.residual[n - 3], r2 = out.residual[n - 2], r3 = out.residual[n - 1];
    const double den = (r3 - r2) - (r2 - r1);
    if (den != 0.0) out.limit = r3 - (r3 - r2) * (r3 - r2) / den;
  }
  return out;
}

}  // namespace sepint::detsolve
