#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double g_kappa(double kappa, double y) {
  return std::sqrt(y * y - 1.0) - kappa * std::acosh(y);
}

// H_kappa by plain bisection on y in [1, hi].
inline double h_kappa_bisect(double kappa, double x, double tol = 1e-12) {
  double lo = 1.0;
  double hi = x + kappa * std::log(2.0 + x) + 2.0;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g_kappa(kappa, mid) < x) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double fd_step(double x) { return 1e-6 * std::max(1.0, std::fabs(x)); }

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double mixed_diff(const std::function<double(double, double)>& f, double x, double y,
                         double hx, double hy) {
  return (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)) /
         (4.0 * hx * hy);
}

// Radius along the hyperbola from the defining relations, with H by bisection.
inline double radius(double theta, double a, double ell, double m) {
  const double kappa = 1.0 / std::sqrt(1.0 + 4.0 * a * a * ell / (m * m));
  const double p = m / (2.0 * a * a * kappa);
  return p * h_kappa_bisect(kappa, std::fabs(theta) / p, 1e-15) - p * kappa;
}

// Derivative formulas in their textbook form, for cross-checking.
struct TextbookJet {
  double R, Rt, Ra, Rtt, Rta, Raa;
};

inline TextbookJet textbook_jet(double theta, double a, double ell, double m) {
  const double kappa = 1.0 / std::sqrt(1.0 + 4.0 * a * a * ell / (m * m));
  const double p = m / (2.0 * a * a * kappa);
  const double s = theta < 0 ? -1.0 : 1.0;
  const double y = h_kappa_bisect(kappa, std::fabs(theta) / p, 1e-16);
  const double R = p * y - p * kappa;
  const double ach = std::acosh(y);
  const double Rt = s * (p / R) * std::sqrt(y * y - 1.0);
  const double dp = -p * (1.0 + kappa * kappa) / a;
  const double dk = -4.0 * a * ell * std::pow(kappa, 3) / (m * m);
  const double d2p = p * (1.0 + kappa * kappa) / (a * a) +
                     p * std::pow(1.0 + kappa * kappa, 2) / (a * a) +
                     8.0 * p * ell * std::pow(kappa, 4) / (m * m);
  const double d2k = -4.0 * ell * std::pow(kappa, 3) / (m * m) +
                     48.0 * a * a * std::pow(kappa, 5) * ell * ell / std::pow(m, 4);
  const double Ra = dp * (y - theta / p * Rt) + p * dk * ach * s * Rt + m / std::pow(a, 3);
  const double Rtt = (ell / R - m / 2.0) / (a * a * R * R);
  const double Rta = (p * p / (R * R)) * ((1.0 - kappa * kappa) * p / R - kappa) *
                         (-theta * dp / (p * p) + dk * ach * s) +
                     (p / R) * dk * Rt;
  const double Raa = d2p * (y - theta / p * Rt) +
                     ((p * p / R) * dk * dk + 2.0 * dp * dk + p * d2k) * ach * s * Rt +
                     Rta * (-(dp / p) * theta + p * dk * ach * s) - theta * (dp * dk / R) * Rt -
                     3.0 * m / std::pow(a, 4);
  return {R, Rt, Ra, Rtt, Rta, Raa};
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
  return v;
}

}  // namespace oracle
