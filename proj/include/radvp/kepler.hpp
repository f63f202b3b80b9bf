#pragma once

namespace radvp {

struct PhysicalConstants {
  double m = 1.0;       // twice the point mass
  double lambda = 1.0;  // self-coupling of the gas
};

void validate(const PhysicalConstants& consts);

// Hyperbola geometry for one (a, ell).  one_minus_kappa is carried separately
// because kappa -> 1 as a^2 ell -> 0 and 1 - kappa would lose every digit.
struct KeplerParams {
  double a = 0.0;
  double ell = 0.0;
  double kappa = 0.0;
  double one_minus_kappa = 0.0;
  double p = 0.0;
  double r0 = 0.0;
};

KeplerParams derive_params(double a, double ell, const PhysicalConstants& consts);

double g_kappa(double kappa, double y);
double h_kappa(double kappa, double x);
double h_kappa_large_x_residual(double kappa, double x);
double v_peak(double a, double ell, const PhysicalConstants& consts);

struct AnomalySolverOptions {
  double tol_rel = 1e-12;
  int max_iter = 100;
};

// Root xi >= 0 of sinh(xi) - kappa*xi = x.  H_kappa(x) = cosh(xi).
double solve_anomaly(double kappa, double one_minus_kappa, double x,
                     const AnomalySolverOptions& opts = {});

// sinh(xi) - kappa*xi without cancellation when kappa is close to 1.
double anomaly_residual_lhs(double kappa, double one_minus_kappa, double xi);

// ln(y + sqrt(y^2-1)) and sqrt(y^2-1) from u = y - 1 >= 0.
double arcosh1p(double u);
double sqrt_y2m1(double u);

inline constexpr double kMaxKappa = 1.0 - 1e-12;

}  // namespace radvp
