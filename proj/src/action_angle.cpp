#include "radvp/action_angle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "radvp/errors.hpp"

namespace radvp {

namespace {

constexpr double kSeriesCut = 0.5;

// Power series in xi for small arguments; all three are nonnegative for xi >= 0
// and vanish to high order at 0, so the direct forms cancel badly there.

// sinh(xi) - xi
double sinh_minus_xi(double xi, double sh) {
  if (xi >= kSeriesCut) return sh - xi;
  const double x2 = xi * xi;
  double term = x2 * xi / 6.0;
  double sum = term;
  for (int k = 2; k < 30; ++k) {
    term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// xi sinh(xi) - 2 (cosh(xi) - 1)
double xi_sh_minus_2u(double xi, double sh, double u) {
  if (xi >= kSeriesCut) return xi * sh - 2.0 * u;
  const double x2 = xi * xi;
  double f = x2 * x2 / 24.0;  // xi^(2k)/(2k)! at k = 2
  double sum = 2.0 * f;
  for (int k = 3; k < 30; ++k) {
    f *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
    const double term = (2.0 * k - 2.0) * f;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// xi cosh(xi) - sinh(xi)
double xi_ch_minus_sh(double xi, double sh, double ch) {
  if (xi >= kSeriesCut) return xi * ch - sh;
  const double x2 = xi * xi;
  double f = x2 * xi / 6.0;  // xi^(2k+1)/(2k+1)! at k = 1
  double sum = 2.0 * f;
  for (int k = 2; k < 30; ++k) {
    f *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double term = 2.0 * k * f;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

void check_aa(const PhaseAA& q) {
  if (!std::isfinite(q.theta)) throw DomainError("theta must be finite");
}

}  // namespace

RadialJet radial_jet(double theta, const KeplerParams& k, const PhysicalConstants& consts,
                     JetOrder order) {
  (void)consts;
  const double s = theta < 0.0 ? -1.0 : 1.0;
  const double kap = k.kappa;
  const double o = k.one_minus_kappa;
  const double a = k.a;
  const double p = k.p;
  const double x = std::fabs(theta) / p;

  const double xi = solve_anomaly(kap, o, x);
  const double sh = std::sinh(xi);
  const double sh2 = std::sinh(0.5 * xi);
  const double u = 2.0 * sh2 * sh2;  // cosh(xi) - 1
  const double D = u + o;            // cosh(xi) - kappa = R/p
  const double one_m_k2 = o * (1.0 + kap);

  RadialJet j;
  j.at_symmetry_point = theta == 0.0;
  j.R = p * D;
  j.dR_dtheta = s * sh / D;

  const double E = xi_sh_minus_2u(xi, sh, u);
  const double N = o * o * o + 2.0 * kap * E + kap * one_m_k2 * u;
  j.dR_da = -(p / a) * N / D;

  if (order == JetOrder::first) return j;

  const double ch = 1.0 + u;
  const double om_ku = o - kap * u;  // 1 - kappa cosh(xi)
  j.d2R_dtheta2 = om_ku / (p * D * D * D);

  // a * dxi/da at fixed theta
  const double xi_a = ((1.0 + kap * kap) * sinh_minus_xi(xi, sh) + o * o * xi) / D;
  j.d2R_dthetada = s * (xi_a * om_ku - one_m_k2 * kap * sh) / (a * D * D);

  // dR/da = -(p/a) N/D with N, D functions of (kappa, xi); differentiate both.
  const double kap_a = -one_m_k2 * kap / a;
  const double N_k = -3.0 * o * o + 2.0 * E + (1.0 - 3.0 * kap * kap) * u;
  const double N_xi = 2.0 * kap * xi_ch_minus_sh(xi, sh, ch) + kap * one_m_k2 * sh;
  const double P_rel = -(2.0 + kap * kap) / a;
  j.d2R_da2 = -(p / (a * D)) * (P_rel * N + kap_a * (N_k + N / D) +
                                (xi_a / a) * (N_xi - N * sh / D));
  return j;
}

RadialJet radial_jet(const PhaseAA& q, const PhysicalConstants& consts, JetOrder order) {
  check_aa(q);
  return radial_jet(q.theta, derive_params(q.a, q.ell, consts), consts, order);
}

RadialJet shifted_radius(const PhaseAA& q, double t, const KeplerParams& k,
                         const PhysicalConstants& consts, JetOrder order) {
  const RadialJet b = radial_jet(q.theta + q.a * t, k, consts, order);
  RadialJet j = b;
  j.dR_da = t * b.dR_dtheta + b.dR_da;
  if (order == JetOrder::second) {
    j.d2R_dthetada = t * b.d2R_dtheta2 + b.d2R_dthetada;
    j.d2R_da2 = t * t * b.d2R_dtheta2 + 2.0 * t * b.d2R_dthetada + b.d2R_da2;
  }
  return j;
}

RadialJet shifted_radius(const PhaseAA& q, double t, const PhysicalConstants& consts,
                         JetOrder order) {
  check_aa(q);
  return shifted_radius(q, t, derive_params(q.a, q.ell, consts), consts, order);
}

PhasePhys to_phys(const PhaseAA& q, const PhysicalConstants& consts) {
  check_aa(q);
  const KeplerParams k = derive_params(q.a, q.ell, consts);
  const double s = q.theta < 0.0 ? -1.0 : 1.0;
  const double xi = solve_anomaly(k.kappa, k.one_minus_kappa, std::fabs(q.theta) / k.p);
  const double sh2 = std::sinh(0.5 * xi);
  const double D = 2.0 * sh2 * sh2 + k.one_minus_kappa;
  return {k.p * D, s * q.a * std::sinh(xi) / D, q.ell};
}

PhaseAA to_aa(const PhasePhys& x, const PhysicalConstants& consts) {
  if (!(x.r > 0.0) || !std::isfinite(x.r) || !std::isfinite(x.v))
    throw DomainError("to_aa needs finite r > 0");
  if (!(x.ell > 0.0)) throw DomainError("to_aa needs ell > 0");
  const double a2 = x.v * x.v + (x.ell - consts.m * x.r) / (x.r * x.r);
  if (!(a2 > 0.0)) throw DomainError("phase point is not on a hyperbolic orbit");
  const double a = std::sqrt(a2);
  const KeplerParams k = derive_params(a, x.ell, consts);
  // |v| = a sinh(xi) p / r  along the orbit
  const double xi = std::asinh(std::fabs(x.v) * x.r / (a * k.p));
  const double s = x.v < 0.0 ? -1.0 : 1.0;
  return {s * k.p * anomaly_residual_lhs(k.kappa, k.one_minus_kappa, xi), a, x.ell};
}

double symplectic_defect_shifted(const PhaseAA& q, double t, const PhysicalConstants& consts) {
  const RadialJet j = shifted_radius(q, t, consts);
  // V = a dR/dtheta, differentiated through the jet.
  const double V_theta = q.a * j.d2R_dtheta2;
  const double V_a = j.dR_dtheta + q.a * j.d2R_dthetada;
  return std::fabs(j.dR_dtheta * V_a - j.dR_da * V_theta - 1.0);
}

double symplectic_defect(const PhaseAA& q, const PhysicalConstants& consts) {
  return symplectic_defect_shifted(q, 0.0, consts);
}

PhasePhys kepler_ode_oracle(const PhasePhys& x0, double t_end, double dt,
                            const PhysicalConstants& consts, const OdeOracleOptions& opts) {
  if (!(dt > 0.0)) throw DomainError("oracle step must be positive");
  (void)to_aa(x0, consts);
  const double m = consts.m;
  const double ell = x0.ell;
  using State = std::array<double, 2>;
  auto rhs = [&](const State& y) -> State {
    const double r = y[0];
    return {y[1], ell / (r * r * r) - m / (2.0 * r * r)};
  };
  auto rk4 = [&](const State& y, double h) -> State {
    const State k1 = rhs(y);
    const State k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
  };

  const double dir = t_end < 0.0 ? -1.0 : 1.0;
  const double span = std::fabs(t_end);
  const double vscale = std::sqrt(std::max(x0.v * x0.v + (ell - m * x0.r) / (x0.r * x0.r), 0.0)) +
                        std::fabs(x0.v);
  State y{x0.r, x0.v};
  double done = 0.0;
  double h = std::min(dt, span);
  while (done < span) {
    const bool last = h >= span - done;
    if (last) h = span - done;
    if (h < opts.min_step * std::max(1.0, span))
      throw StepSizeError("Kepler ODE oracle step size underflow near r=" + std::to_string(y[0]));
    const State big = rk4(y, dir * h);
    const State half = rk4(y, 0.5 * dir * h);
    const State fine = rk4(half, 0.5 * dir * h);
    const double er = std::fabs(fine[0] - big[0]) / (15.0 * opts.rtol * fine[0]);
    const double ev = std::fabs(fine[1] - big[1]) / (15.0 * opts.rtol * (std::fabs(fine[1]) + vscale));
    const double err = std::max(er, ev);
    if (err <= 1.0 && fine[0] > 0.0) {
      y = {fine[0] + (fine[0] - big[0]) / 15.0, fine[1] + (fine[1] - big[1]) / 15.0};
      done = last ? span : done + h;
      h *= std::clamp(0.9 * std::pow(std::max(err, 1e-300), -0.2), 1.0, 4.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  return {y[0], y[1], ell};
}

}  // namespace radvp
