#pragma once

// Residuals of the determining equations for separable potentials, the ODEs on V1 and V2,
// the homogeneous families, quadrature reconstruction of g1/g2, and a finite-difference
// commutator oracle for quantum integrals without angular momentum.

#include <optional>
#include <string>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/phasecore.hpp"

namespace sepint::detsolve {

/// Uniform node grid, endpoints included.
struct GridSpec {
  Interval x{-1.0, 1.0};
  Interval y{-1.0, 1.0};
  int nx = 21;
  int ny = 21;
  /// Minimum distance of every node from a declared singular line.
  double margin = 1e-3;

  double xs(int i) const { return nx == 1 ? x.lo : x.lo + (x.hi - x.lo) * i / (nx - 1); }
  double ys(int j) const { return ny == 1 ? y.lo : y.lo + (y.hi - y.lo) * j / (ny - 1); }
};

inline constexpr double kClosedFormTolerance = 1e-9;
inline constexpr double kSpecialFunctionTolerance = 1e-6;

struct EquationResidual {
  std::string name;
  /// Largest per-node normalized residual |r| / (1 + max |term|).
  double max_abs = 0.0;
  double rms = 0.0;
  /// Largest unnormalized |r|.
  double raw_max = 0.0;
  /// Largest term magnitude seen, the normalization scale.
  double scale = 0.0;
  std::size_t nodes = 0;
};

struct ResidualReport {
  std::vector<EquationResidual> equations;
  double tolerance = kClosedFormTolerance;
  bool pass = true;

  const EquationResidual& at(const std::string& name) const;
  double max_abs() const;
};

/// Separable determining equations (value, two first-order and the mixed one) on the grid.
ResidualReport residual_determining(const SeparablePotential& potential, const ThirdOrderIntegral& integral,
                                    const GridSpec& grid, double tolerance = kClosedFormTolerance);

/// Linear compatibility condition of the potential against a coefficient pattern.
ResidualReport residual_linear_compat(const SeparablePotential& potential, const CoeffTensor& coeffs,
                                      const GridSpec& grid, double tolerance = kClosedFormTolerance);

/// (A210 x^2 + A111 x + A012) V1''' + 4(2 A210 x + A111) V1'' + 12 A210 V1' - (rhs_a x + rhs_b).
ResidualReport ode_residual_11(const Potential1D& v1, double A210, double A111, double A012, double rhs_a,
                               double rhs_b, const std::vector<double>& xs, double tolerance = kClosedFormTolerance);
/// (A201 y^2 - A111 y + A021) V2''' + 4(2 A201 y - A111) V2'' + 12 A201 V2' - (rhs_a y + rhs_b).
ResidualReport ode_residual_12(const Potential1D& v2, double A201, double A111, double A021, double rhs_a,
                               double rhs_b, const std::vector<double>& ys, double tolerance = kClosedFormTolerance);

enum class Family { A1, A2, A3, A4, A5, A6, A7 };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct FamilyParams {
  double alpha = 1.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// The family member as a one-dimensional potential.
Potential1D family_potential(Family f, const FamilyParams& p);

struct FitResult {
  double rhs_a = 0.0;
  double rhs_b = 0.0;
  /// max |LHS - (a x + b)| / (1 + max |LHS|) after the fit.
  double residual = 0.0;
};

class ConfigMismatchError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit of a linear right side to the ODE's left side for a family member.
FitResult fit_homogeneous_family(Family f, const FamilyParams& p, double A210, double A111, double A012,
                                 const std::vector<double>& xs);

struct QuadratureResult {
  bool feasible = false;
  /// Equation judged violated when infeasible (eq7 first, then eq8..eq10).
  std::string violating;
  CorrectionFields fields;
  ResidualReport report;
  /// Constants fixed by the value equation: g1 += k1 - c (y - y0), g2 += k2 + c (x - x0).
  double k1 = 0.0, k2 = 0.0, c = 0.0;
};

/// Rebuilds g1, g2 from the two first-order equations by axis-parallel quadrature from `anchor`,
/// separates the mixed equation, and fixes the remaining constants on the value equation.
QuadratureResult solve_g_quadrature(const SeparablePotential& potential, const CoeffTensor& coeffs,
                                    std::pair<double, double> anchor, const GridSpec& grid,
                                    double tolerance = kClosedFormTolerance);

struct GaussianTest {
  double x0 = 0.0;
  double y0 = 0.0;
  double sigma = 0.3;
};

struct OracleResult {
  double norm = 0.0;  // ||[H, X] psi|| / ||psi|| on the interior nodes
  double h = 0.0;
  /// Set when the spacing is coarse against the test function width.
  bool coarse_warning = false;
};

/// Applies H X - X H to a Gaussian with central finite differences of the given even order.
/// The grid is the evaluation region; ghost nodes are added around it.
OracleResult commutator_oracle(const SeparablePotential& potential, const ThirdOrderIntegral& integral,
                               const GaussianTest& psi, const GridSpec& grid, int stencil_order = 6);

struct ConvergenceStudy {
  std::vector<double> h;
  std::vector<double> residual;
  /// log2 of successive residual ratios.
  std::vector<double> observed_order;
  /// Aitken extrapolation from the last three residuals.
  double limit = 0.0;
};

/// Runs the oracle at h, h/2, ..., halving `levels - 1` times over the same region.
ConvergenceStudy commutator_convergence(const SeparablePotential& potential, const ThirdOrderIntegral& integral,
                                        const GaussianTest& psi, Interval xr, Interval yr, double h0, int levels = 3,
                                        int stencil_order = 6);

/// Central finite-difference weights for the m-th derivative on offsets -r..r, Fornberg's recursion.
std::vector<long double> central_weights(int m, int r);

}  // namespace sepint::detsolve
