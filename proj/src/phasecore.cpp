#include "sepint/phasecore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sepint {

namespace {

const std::vector<std::string> kRecognized = {
    "a",     "b",     "c",      "d",      "d_tilde", "alpha", "hbar",  "omega", "omega1",
    "omega2", "K1",   "K2",     "kappa",  "b1",      "b2",    "beta1", "beta2", "sigma",
    "lambda", "k",    "k1",     "k2",     "wp_g2",   "wp_g3"};

// Cubic momentum part P = sum A L^i px^j py^k and its partial derivatives.
struct CubicPart {
  double p = 0.0;
  double p_x = 0.0;
  double p_y = 0.0;
  double p_px = 0.0;
  double p_py = 0.0;
};

CubicPart cubic_part(const CoeffTensor& A, const PhaseState& s) {
  const double L = s.x * s.py - s.y * s.px;
  const auto coeffs = A.as_array();
  const auto& ex = CoeffTensor::exponents();
  CubicPart out;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const double a = coeffs[n];
    if (a == 0.0) continue;
    const int i = ex[n][0], j = ex[n][1], k = ex[n][2];
    const double Li = ipow(L, i), pj = ipow(s.px, j), pk = ipow(s.py, k);
    const double dLi = i > 0 ? i * ipow(L, i - 1) : 0.0;
    const double dpj = j > 0 ? j * ipow(s.px, j - 1) : 0.0;
    const double dpk = k > 0 ? k * ipow(s.py, k - 1) : 0.0;
    out.p += a * Li * pj * pk;
    // dL/dx = py, dL/dy = -px, dL/dpx = -y, dL/dpy = x
    out.p_x += a * dLi * s.py * pj * pk;
    out.p_y += a * dLi * (-s.px) * pj * pk;
    out.p_px += a * (dLi * (-s.y) * pj * pk + Li * dpj * pk);
    out.p_py += a * (dLi * s.x * pj * pk + Li * pj * dpk);
  }
  return out;
}

bool on_line(double v, const std::vector<double>& lines) {
  return std::any_of(lines.begin(), lines.end(),
                     [v](double s) { return std::abs(v - s) <= 1e-12 * (1.0 + std::abs(s)); });
}

}  // namespace

ParamSet::ParamSet(std::initializer_list<std::pair<const std::string, double>> init) {
  for (const auto& [k, v] : init) set(k, v);
}

ParamSet& ParamSet::set(const std::string& name, double value) {
  if (!is_recognized(name)) throw SchemaError("unknown parameter name '" + name + "'");
  if (!std::isfinite(value)) throw SchemaError("parameter '" + name + "' must be finite");
  if (name == "hbar" && value < 0.0) throw SchemaError("hbar must be nonnegative");
  values_[name] = value;
  return *this;
}

double ParamSet::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw SchemaError("missing parameter '" + name + "'");
  return it->second;
}

double ParamSet::get_or(const std::string& name, double fallback) const {
  auto it = values_.find(name);
  return it == values_.end() ? fallback : it->second;
}

const std::vector<std::string>& ParamSet::recognized_names() { return kRecognized; }

bool ParamSet::is_recognized(const std::string& name) {
  return std::find(kRecognized.begin(), kRecognized.end(), name) != kRecognized.end();
}

Potential1D::Potential1D() : Potential1D([](double) { return DerivStack{}; }, {}, "0") {}

Potential1D::Potential1D(Evaluator eval, std::vector<double> singularities, std::string label, Interval domain)
    : eval_(std::move(eval)), singularities_(std::move(singularities)), label_(std::move(label)), domain_(domain) {}

Potential1D Potential1D::zero() { return Potential1D(); }

DerivStack Potential1D::operator()(double x) const {
  if (on_line(x, singularities_)) {
    std::ostringstream msg;
    msg << "potential '" << label_ << "' evaluated at singular point " << x;
    throw SingularPointError(msg.str());
  }
  if (!domain_.contains(x)) {
    std::ostringstream msg;
    msg << "potential '" << label_ << "' evaluated at " << x << " outside its domain (" << domain_.lo << ", "
        << domain_.hi << ")";
    throw DomainError(msg.str());
  }
  return eval_(x);
}

double Potential1D::clearance(double x) const {
  double c = std::min(x - domain_.lo, domain_.hi - x);
  for (double s : singularities_) c = std::min(c, std::abs(x - s));
  return c;
}

double SeparablePotential::clearance(double x, double y) const { return std::min(v1.clearance(x), v2.clearance(y)); }

const std::array<std::array<int, 3>, 10>& CoeffTensor::exponents() {
  static const std::array<std::array<int, 3>, 10> ex = {{{3, 0, 0},
                                                         {2, 1, 0},
                                                         {2, 0, 1},
                                                         {1, 2, 0},
                                                         {1, 1, 1},
                                                         {1, 0, 2},
                                                         {0, 3, 0},
                                                         {0, 2, 1},
                                                         {0, 1, 2},
                                                         {0, 0, 3}}};
  return ex;
}

bool CoeffTensor::is_zero() const {
  const auto a = as_array();
  return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
}

CoeffTensor CoeffTensor::scaled(double s) const {
  return {a300 * s, a210 * s, a201 * s, a120 * s, a111 * s, a102 * s, a030 * s, a021 * s, a012 * s, a003 * s};
}

Dual2 Channel::operator()(int n) const {
  if (n < 0 || n > 3) throw DerivativeUnavailableError("channel order must be 0..3");
  const double slope = s_[static_cast<std::size_t>(n + 1)];
  return {s_[static_cast<std::size_t>(n)], slope * arg_.dx, slope * arg_.dy};
}

Field2D zero_field() {
  return [](double, double) { return FieldValue{}; };
}

CorrectionFields zero_corrections() {
  CorrectionFields g;
  g.g1 = zero_field();
  g.g2 = zero_field();
  g.trivial = true;
  return g;
}

void ThirdOrderIntegral::validate() const {
  for (double a : coeffs.as_array())
    if (!std::isfinite(a)) throw SchemaError("integral '" + label + "' has a non-finite coefficient");
  if (coeffs.is_zero() && corrections.trivial)
    throw SchemaError("integral '" + label + "' is identically zero");
}

FPolynomials eval_f_polynomials(const CoeffTensor& A, double x, double y) {
  FPolynomials f;
  f.f1 = -A.a300 * y * y * y + A.a210 * y * y - A.a120 * y + A.a030;
  f.f2 = 3 * A.a300 * x * y * y - 2 * A.a210 * x * y + A.a201 * y * y + A.a120 * x - A.a111 * y + A.a021;
  f.f3 = -3 * A.a300 * x * x * y + A.a210 * x * x - 2 * A.a201 * x * y + A.a111 * x - A.a102 * y + A.a012;
  f.f4 = A.a300 * x * x * x + A.a201 * x * x + A.a102 * x + A.a003;
  return f;
}

FPolyPartials eval_f_partials(const CoeffTensor& A, double x, double y) {
  FPolyPartials p;
  p.f1yy = -6 * A.a300 * y + 2 * A.a210;
  p.f2y = 6 * A.a300 * x * y - 2 * A.a210 * x + 2 * A.a201 * y - A.a111;
  p.f2xy = 6 * A.a300 * y - 2 * A.a210;
  p.f2yy = 6 * A.a300 * x + 2 * A.a201;
  p.f3x = -6 * A.a300 * x * y + 2 * A.a210 * x - 2 * A.a201 * y + A.a111;
  p.f3xx = -6 * A.a300 * y + 2 * A.a210;
  p.f3xy = -6 * A.a300 * x - 2 * A.a201;
  p.f4xx = 6 * A.a300 * x + 2 * A.a201;
  return p;
}

void require_regular(const CorrectionFields& g, double x, double y) {
  if (on_line(x, g.singular_x) || on_line(y, g.singular_y)) {
    std::ostringstream msg;
    msg << "correction fields are singular at (" << x << ", " << y << ")";
    throw SingularPointError(msg.str());
  }
}

double eval_integral_classical(const ThirdOrderIntegral& integral, const PhaseState& s) {
  require_regular(integral.corrections, s.x, s.y);
  const CubicPart c = cubic_part(integral.coeffs, s);
  const FieldValue g1 = integral.corrections.g1(s.x, s.y);
  const FieldValue g2 = integral.corrections.g2(s.x, s.y);
  const double v = 2.0 * c.p + 2.0 * g1.value * s.px + 2.0 * g2.value * s.py;
  if (!std::isfinite(v)) throw SingularPointError("integral is not finite at the requested state");
  return v;
}

namespace {

struct BracketTerms {
  double x_flow = 0.0;   // X_x * px
  double y_flow = 0.0;   // X_y * py
  double px_flow = 0.0;  // X_px * V1'
  double py_flow = 0.0;  // X_py * V2'
};

BracketTerms bracket_terms(const ThirdOrderIntegral& integral, const SeparablePotential& potential,
                           const PhaseState& s) {
  require_regular(integral.corrections, s.x, s.y);
  const CubicPart c = cubic_part(integral.coeffs, s);
  const FieldValue g1 = integral.corrections.g1(s.x, s.y);
  const FieldValue g2 = integral.corrections.g2(s.x, s.y);
  const double v1x = potential.v1(s.x)[1];
  const double v2y = potential.v2(s.y)[1];
  const double X_x = 2.0 * (c.p_x + g1.dx * s.px + g2.dx * s.py);
  const double X_y = 2.0 * (c.p_y + g1.dy * s.px + g2.dy * s.py);
  const double X_px = 2.0 * (c.p_px + g1.value);
  const double X_py = 2.0 * (c.p_py + g2.value);
  return {X_x * s.px, X_y * s.py, X_px * v1x, X_py * v2y};
}

}  // namespace

double poisson_bracket_residual(const ThirdOrderIntegral& integral, const SeparablePotential& potential,
                                const PhaseState& s) {
  const BracketTerms t = bracket_terms(integral, potential, s);
  return t.x_flow + t.y_flow - t.px_flow - t.py_flow;
}

double poisson_bracket_scale(const ThirdOrderIntegral& integral, const SeparablePotential& potential,
                             const PhaseState& s) {
  const BracketTerms t = bracket_terms(integral, potential, s);
  return std::max({std::abs(t.x_flow), std::abs(t.y_flow), std::abs(t.px_flow), std::abs(t.py_flow)});
}

double hamiltonian(const SeparablePotential& potential, const PhaseState& s) {
  return 0.5 * (s.px * s.px + s.py * s.py) + potential.value(s.x, s.y);
}

}  // namespace sepint
