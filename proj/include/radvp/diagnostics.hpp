#pragma once

#include <span>
#include <string>
#include <vector>

#include "radvp/config.hpp"
#include "radvp/dynamics.hpp"
#include "radvp/field.hpp"

namespace radvp {

// Least-squares line y = intercept + slope * x with a 95% half-width on the slope.
struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
  int n = 0;
  bool below_noise = false;  // every value in the window sat at the noise floor
  bool degenerate = false;   // too few usable points for a line
};

Fit fit_line(std::span<const double> x, std::span<const double> y);

// ln(value) against ln(1 + t) for t in [t_lo, t_hi), ignoring values <= floor.
Fit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo, double t_hi,
              double floor);

struct FInfCurve {
  std::vector<double> a;
  std::vector<double> f;       // -(1/a^2) sum_{a_i(T) <= a} m_i
  std::vector<double> f_eff;   // T^2 F_eff(T, a T)
  double total_mass = 0.0;
  double t = 0.0;
  double max_discrepancy = 0.0;  // over the interior, relative to sup |f| there
  bool warn = false;

  // linear interpolation on the grid; the closed form outside it
  double operator()(double a) const;
};

FInfCurve estimate_f_infinity(const Ensemble& at_T, std::span<const double> a_grid, double interior_lo,
                              double interior_hi, double tolerance);

// sup_i |Xi_i(t_k) - Xi_i(T)| with Xi = theta + coeff * lambda * ln(1+t) * F_inf(a).
std::vector<double> xi_deviation(const History& h, const FInfCurve& f_inf, double coeff = 1.0);

// Summed per-group 1D W1 distance between the snapshots.  With `shift` the earlier
// snapshot is moved along the log correction first.
double weak_convergence_metric(const Ensemble& at_t, const Ensemble& at_T, const FInfCurve* shift);

// Maximum relative change of (ell, w, g) across the states; nonzero throws InternalError.
double lp_conservation_check(std::span<const Ensemble> states);

// (1/(hi-lo)) * integral over [lo, hi] of (1 + c/x^2) |C1(x) - C2(x)| dx with
// C_k(x) = sum over x_k[i] <= x of m[i].
double mean_staircase_gap(std::span<const double> x1, std::span<const double> x2, std::span<const double> m,
                          double lo, double hi, double c);

struct Thresholds {
  static constexpr double action_slope = -0.4;
  static constexpr double xi_slope = -0.3;
  static constexpr double w1_slope = -0.3;
  static constexpr double f_inf_slope = -0.3;
  static constexpr double field_eff_slope = -0.4;
  static constexpr double xi_zeroed_factor = 5.0;
  static constexpr double half_spread = 1.5;
  static constexpr double half_level_lo = 0.5;
  static constexpr double half_level_hi = 2.0;
  static constexpr double tangent_lo = 0.4;
  static constexpr double tangent_hi = 1.6;
  static constexpr double field_eff_t_min = 10.0;
};

struct ScatteringReport {
  std::vector<double> times;
  std::vector<MomentSpec> moment_specs;
  std::vector<std::vector<double>> moments;  // [spec][time]
  std::vector<double> support_margin;
  std::vector<double> a_drift;          // max_i |a_i(t) - a_i(0)|
  std::vector<double> a_dev;            // sup_i |a_i(t) - a_i(T)|
  std::vector<double> theta_drift;      // sup_i |theta_i(t) - theta_i(0)|
  std::vector<double> theta_dev;        // sup_i |theta_i(t) - theta_i(T)|, no correction
  std::vector<double> xi_dev;
  std::vector<double> xi_dev_half;      // correction coefficient halved
  std::vector<double> w1;
  std::vector<double> f_inf_gap;        // mean a^2 |t^2 F_eff(t, a t) - F_inf(a)| on the interior
  std::vector<double> field_eff_gap;    // mean (r^2 + t^2) |F - F_eff| along r = a t on the interior
  std::vector<double> tangent_min, tangent_max;  // range of d a / d a0, empty without tangents
  FInfCurve f_inf;
  double interior_lo = 0.0, interior_hi = 0.0;

  double max_action_drift = 0.0;
  double min_support_margin = 0.0;
  double conservation_drift = 0.0;
  Fit action_fit, xi_fit, w1_fit, f_inf_fit, field_eff_fit;
  Fit theta_growth;  // theta_drift against ln(1+t), linear
  double xi_zeroed_ratio = 0.0;
  double half_spread = 0.0, half_level = 0.0, half_expected = 0.0;

  bool support_ok = false;
  bool conservation_ok = false;
  bool action_ok = false;
  bool theta_growth_ok = false;
  bool xi_ok = false;
  bool xi_zeroed_ok = false;
  bool half_control_ok = false;
  bool w1_ok = false;
  bool f_inf_ok = false;
  bool field_eff_ok = false;
  bool tangent_ok = false;  // true when the run carried no tangents
};

// All diagnostics from snapshots.  `states` (optional) feeds the conservation check.
ScatteringReport analyze(const History& h, const AnalysisConfig& cfg, std::span<const MomentSpec> moments = {},
                         std::span<const Ensemble> states = {});

}  // namespace radvp
