#include "radvp/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radvp/errors.hpp"

namespace radvp {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa <= kMaxKappa))
    throw DomainError("kappa must lie in [0, 1-1e-12], got " + std::to_string(kappa));
}

// sinh(xi) - xi, accurate for small xi.
double sinh_minus_id(double xi) {
  const double ax = std::fabs(xi);
  if (ax < 0.25) {
    const double x2 = xi * xi;
    double s = 1.0 / 39916800.0;
    s = s * x2 + 1.0 / 362880.0;
    s = s * x2 + 1.0 / 5040.0;
    s = s * x2 + 1.0 / 120.0;
    s = s * x2 + 1.0 / 6.0;
    return s * x2 * xi;
  }
  return std::sinh(xi) - xi;
}

}  // namespace

void validate(const PhysicalConstants& consts) {
  if (!positive_finite(consts.m)) throw DomainError("m must be positive");
  if (!(std::isfinite(consts.lambda) && consts.lambda >= 0.0))
    throw DomainError("lambda must be nonnegative");
}

KeplerParams derive_params(double a, double ell, const PhysicalConstants& consts) {
  if (!positive_finite(a)) throw DomainError("action a must be positive");
  if (!positive_finite(ell)) throw DomainError("angular momentum ell must be positive");
  const double m = consts.m;
  const double a2 = a * a;
  const double sq = std::sqrt(m * m + 4.0 * a2 * ell);
  KeplerParams k;
  k.a = a;
  k.ell = ell;
  k.kappa = m / sq;
  k.one_minus_kappa = 4.0 * a2 * ell / (sq * (sq + m));
  k.p = sq / (2.0 * a2);
  k.r0 = 2.0 * ell / (sq + m);
  if (!(k.one_minus_kappa > 0.0)) throw DomainError("a^2 ell underflows: degenerate orbit");
  return k;
}

double arcosh1p(double u) { return std::log1p(u + std::sqrt(u * (2.0 + u))); }

double sqrt_y2m1(double u) { return std::sqrt(u * (2.0 + u)); }

double g_kappa(double kappa, double y) {
  check_kappa(kappa);
  if (!(y >= 1.0)) throw DomainError("g_kappa needs y >= 1");
  const double u = y - 1.0;
  return sqrt_y2m1(u) - kappa * arcosh1p(u);
}

double anomaly_residual_lhs(double kappa, double one_minus_kappa, double xi) {
  if (kappa < 0.5) return std::sinh(xi) - kappa * xi;
  return one_minus_kappa * xi + sinh_minus_id(xi);
}

double solve_anomaly(double kappa, double omk, double x, const AnomalySolverOptions& opts) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("h_kappa needs finite x >= 0");
  if (x == 0.0) return 0.0;

  const double y_hi = x + kappa * std::log(2.0 + x) + 2.0;
  double hi = arcosh1p(y_hi - 1.0);
  hi = std::min(hi, std::asinh(x / omk));
  hi = std::min(hi, std::cbrt(6.0 * x));
  while (anomaly_residual_lhs(kappa, omk, hi) < x) hi *= 1.0 + 1e-12;
  double lo = 0.0;

  double guess;
  if (x < std::pow(omk, 1.5)) {
    guess = arcosh1p(x * x / (2.0 * omk * omk));
  } else {
    const double y0 = x + kappa * std::log1p(x);
    guess = y0 > 1.0 ? arcosh1p(y0 - 1.0) : 0.0;
  }
  double xi = std::clamp(guess, lo, hi);

  const double tol = opts.tol_rel * (1.0 + x);
  for (int it = 0; it < opts.max_iter; ++it) {
    const double f = anomaly_residual_lhs(kappa, omk, xi) - x;
    if (f == 0.0) return xi;
    if (f < 0.0) lo = xi; else hi = xi;
    const double sh = std::sinh(0.5 * xi);
    const double fp = omk + 2.0 * sh * sh;
    const double step = f / fp;
    double next = xi - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool stalled = std::fabs(next - xi) <= 2.0 * std::numeric_limits<double>::epsilon() * xi ||
                         hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi;
    if (stalled) {
      const double fn = anomaly_residual_lhs(kappa, omk, next) - x;
      if (std::fabs(fn) <= tol) return std::fabs(fn) < std::fabs(f) ? next : xi;
      if (std::fabs(f) <= tol) return xi;
      break;
    }
    xi = next;
  }
  throw ConvergenceError("hyperbolic anomaly solve did not converge for kappa=" +
                         std::to_string(kappa) + " x=" + std::to_string(x));
}

double h_kappa(double kappa, double x) {
  check_kappa(kappa);
  const double xi = solve_anomaly(kappa, 1.0 - kappa, x);
  const double sh = std::sinh(0.5 * xi);
  return 1.0 + 2.0 * sh * sh;
}

double h_kappa_large_x_residual(double kappa, double x) {
  if (!(x >= 10.0)) throw DomainError("large-x residual needs x >= 10");
  const double lx = std::log(x);
  return h_kappa(kappa, x) - x - kappa * lx - kappa * kappa * lx / x;
}

double v_peak(double a, double ell, const PhysicalConstants& consts) {
  if (!positive_finite(a) || !positive_finite(ell)) throw DomainError("v_peak needs a, ell > 0");
  return std::sqrt(a * a + consts.m * consts.m / (4.0 * ell));
}

}  // namespace radvp
