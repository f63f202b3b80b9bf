#include "radvp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "radvp/errors.hpp"
#include "radvp/kernels.hpp"

namespace radvp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double staircase_integral(std::span<const double> x1, std::span<const double> x2, std::span<const double> m,
                          double lo, double hi, double c) {
  struct Ev {
    double x;
    double dm;
    std::size_t key;
  };
  std::vector<Ev> ev;
  ev.reserve(2 * m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    ev.push_back({x1[i], m[i], 2 * i});
    ev.push_back({x2[i], -m[i], 2 * i + 1});
  }
  std::sort(ev.begin(), ev.end(), [](const Ev& u, const Ev& v) { return u.x < v.x || (u.x == v.x && u.key < v.key); });
  auto weight = [c](double u, double v) { return c == 0.0 ? v - u : (v - u) + c * (1.0 / u - 1.0 / v); };
  double d = 0.0;
  std::size_t k = 0;
  while (k < ev.size() && ev[k].x <= lo) d += ev[k++].dm;
  double x = lo;
  double acc = 0.0;
  for (; k < ev.size() && ev[k].x < hi; ++k) {
    if (ev[k].x > x) {
      if (d != 0.0) acc += std::fabs(d) * weight(x, ev[k].x);
      x = ev[k].x;
    }
    d += ev[k].dm;
  }
  // on an unbounded interval both staircases end at the same total; what is left is rounding
  if (hi > x && d != 0.0 && std::isfinite(hi)) acc += std::fabs(d) * weight(x, hi);
  return acc;
}

std::vector<double> masses_of(std::span<const Marker> markers) {
  std::vector<double> m(markers.size());
  for (std::size_t i = 0; i < markers.size(); ++i) m[i] = mass(markers[i]);
  return m;
}

double sup_abs_diff(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::fabs(u[i] - v[i]));
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Fit fit_line(std::span<const double> x, std::span<const double> y) {
  Fit f;
  f.n = static_cast<int>(x.size());
  if (x.size() < 3) {
    f.degenerate = true;
    return f;
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    f.degenerate = true;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  const double se = std::sqrt(sse / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  f.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return f;
}

Fit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo, double t_hi,
              double floor) {
  std::vector<double> x, y;
  int in_window = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_lo || !(times[k] < t_hi)) continue;
    ++in_window;
    if (values[k] > floor) {
      x.push_back(std::log1p(times[k]));
      y.push_back(std::log(values[k]));
    }
  }
  if (in_window > 0 && x.empty()) {
    Fit f;
    f.below_noise = true;
    return f;
  }
  return fit_line(x, y);
}

double FInfCurve::operator()(double x) const {
  if (a.empty() || x < a.front()) return 0.0;
  if (x > a.back()) return -total_mass / (x * x);
  const auto it = std::upper_bound(a.begin(), a.end(), x);
  if (it == a.end()) return f.back();
  const std::size_t j = static_cast<std::size_t>(it - a.begin());
  const double s = (x - a[j - 1]) / (a[j] - a[j - 1]);
  return f[j - 1] + s * (f[j] - f[j - 1]);
}

FInfCurve estimate_f_infinity(const Ensemble& ens, std::span<const double> a_grid, double interior_lo,
                              double interior_hi, double tolerance) {
  FInfCurve c;
  c.t = ens.t;
  c.a.assign(a_grid.begin(), a_grid.end());
  const std::vector<double> m = masses_of(ens.markers);
  std::vector<double> acts(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) acts[i] = ens.markers[i].a;
  const FieldView by_action(acts, m, ens.t);
  c.total_mass = by_action.total_mass();
  const bool have_eff = ens.t > 0.0;
  const FieldView eff = have_eff ? build_effective_view(ens, ens.t) : FieldView{};
  double sup = 0.0, gap = 0.0;
  for (double a : c.a) {
    const double fa = -by_action.enclosed_mass(a) / (a * a);
    const double fe = have_eff ? ens.t * ens.t * eff.force(a * ens.t) : std::nan("");
    c.f.push_back(fa);
    c.f_eff.push_back(fe);
    if (a >= interior_lo && a <= interior_hi) {
      sup = std::max(sup, std::fabs(fa));
      if (have_eff) gap = std::max(gap, std::fabs(fa - fe));
    }
  }
  c.max_discrepancy = sup > 0.0 ? gap / sup : 0.0;
  c.warn = !have_eff || c.max_discrepancy > tolerance;
  return c;
}

std::vector<double> xi_deviation(const History& h, const FInfCurve& f_inf, double coeff) {
  std::vector<double> out;
  if (h.snapshots.empty()) return out;
  const double lam = coeff * h.consts.lambda;
  const Snapshot& last = h.snapshots.back();
  const double lT = std::log1p(last.t);
  std::vector<double> xi_T(last.theta.size());
  for (std::size_t i = 0; i < xi_T.size(); ++i) xi_T[i] = last.theta[i] + lam * lT * f_inf(last.a[i]);
  for (const Snapshot& s : h.snapshots) {
    const double lt = std::log1p(s.t);
    double sup = 0.0;
    for (std::size_t i = 0; i < xi_T.size(); ++i)
      sup = std::max(sup, std::fabs(s.theta[i] + lam * lt * f_inf(s.a[i]) - xi_T[i]));
    out.push_back(sup);
  }
  return out;
}

double weak_convergence_metric(const Ensemble& at_t, const Ensemble& at_T, const FInfCurve* shift) {
  const std::size_t n = at_t.markers.size();
  if (n != at_T.markers.size()) throw MismatchedRunError("snapshots have different marker counts");
  const double lam = at_t.consts.lambda;
  const double dl = std::log1p(at_T.t) - std::log1p(at_t.t);
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (at_t.markers[i].group != at_T.markers[i].group)
      throw MismatchedRunError("snapshots disagree on marker groups");
    groups[at_t.markers[i].group].push_back(i);
  }
  double total = 0.0;
  std::vector<double> p, q, m;
  for (const auto& [g, idx] : groups) {
    p.clear();
    q.clear();
    m.clear();
    for (std::size_t i : idx) {
      const Marker& u = at_t.markers[i];
      double th = u.theta;
      if (shift) th -= lam * dl * (*shift)(u.a);
      p.push_back(th);
      q.push_back(at_T.markers[i].theta);
      m.push_back(mass(u));
    }
    total += staircase_integral(p, q, m, -kInf, kInf, 0.0);
  }
  return total;
}

double lp_conservation_check(std::span<const Ensemble> states) {
  if (states.empty()) return 0.0;
  const std::vector<Marker>& ref = states.front().markers;
  double drift = 0.0;
  auto rel = [](double x, double y) { return x == y ? 0.0 : std::fabs(x - y) / std::max(std::fabs(x), std::fabs(y)); };
  for (const Ensemble& e : states) {
    if (e.markers.size() != ref.size()) throw InternalError("marker count changed during the run");
    for (std::size_t i = 0; i < ref.size(); ++i) {
      drift = std::max({drift, rel(ref[i].ell, e.markers[i].ell), rel(ref[i].w, e.markers[i].w),
                        rel(ref[i].g, e.markers[i].g)});
    }
  }
  if (drift != 0.0) throw InternalError("carried values changed during the run (relative drift " + std::to_string(drift) + ")");
  return drift;
}

double mean_staircase_gap(std::span<const double> x1, std::span<const double> x2, std::span<const double> m,
                          double lo, double hi, double c) {
  if (!(hi > lo)) throw DomainError("mean_staircase_gap needs lo < hi");
  return staircase_integral(x1, x2, m, lo, hi, c) / (hi - lo);
}

ScatteringReport analyze(const History& h, const AnalysisConfig& cfg, std::span<const MomentSpec> moments,
                         std::span<const Ensemble> states) {
  ScatteringReport r;
  if (h.snapshots.empty()) throw DomainError("history has no snapshots");
  const std::size_t n = h.initial.size();
  const std::size_t K = h.snapshots.size();
  const Snapshot& first = h.snapshots.front();
  const Snapshot& last = h.snapshots.back();
  const double T = last.t;
  const std::vector<double> m = masses_of(h.initial);
  const Ensemble ens_T = h.ensemble_at(K - 1);

  // action support at T and its interior
  double amin = kInf, amax = -kInf;
  for (double a : last.a) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  r.interior_lo = amin + cfg.interior_fraction * (amax - amin);
  r.interior_hi = amax - cfg.interior_fraction * (amax - amin);
  std::vector<double> grid(static_cast<std::size_t>(cfg.a_grid_points));
  for (std::size_t j = 0; j < grid.size(); ++j)
    grid[j] = amin + (amax - amin) * static_cast<double>(j) / static_cast<double>(grid.size() - 1);
  if (amax == amin) grid.assign(1, amin);
  r.f_inf = estimate_f_infinity(ens_T, grid, r.interior_lo, r.interior_hi, cfg.f_inf_tolerance);

  r.moment_specs.assign(moments.begin(), moments.end());
  r.moments.resize(moments.size());
  double sup_theta = 0.0;
  for (double th : last.theta) sup_theta = std::max(sup_theta, std::fabs(th));

  kernels::JetArrays jets;
  std::vector<double> radii_over_t(n), acts(n);
  const bool interior_ok = r.interior_hi > r.interior_lo;
  for (std::size_t k = 0; k < K; ++k) {
    const Snapshot& s = h.snapshots[k];
    r.times.push_back(s.t);
    const Ensemble e = h.ensemble_at(k);
    r.support_margin.push_back(support_margin(e));
    for (std::size_t j = 0; j < moments.size(); ++j) r.moments[j].push_back(moment_norm(e, moments[j]));
    r.a_drift.push_back(sup_abs_diff(s.a, first.a));
    r.a_dev.push_back(sup_abs_diff(s.a, last.a));
    r.theta_drift.push_back(sup_abs_diff(s.theta, first.theta));
    r.theta_dev.push_back(sup_abs_diff(s.theta, last.theta));
    r.w1.push_back(weak_convergence_metric(e, ens_T, &r.f_inf));
    if (!s.d_a_da.empty()) {
      const auto [lo, hi] = std::minmax_element(s.d_a_da.begin(), s.d_a_da.end());
      r.tangent_min.push_back(*lo);
      r.tangent_max.push_back(*hi);
    }
    if (interior_ok) {
      r.f_inf_gap.push_back(mean_staircase_gap(s.a, last.a, m, r.interior_lo, r.interior_hi, 0.0));
      if (s.t > 0.0) {
        kernels::omp::shifted_jets(e.markers, s.t, h.consts, JetOrder::first, jets);
        for (std::size_t i = 0; i < n; ++i) radii_over_t[i] = jets.R[i] / s.t;
        r.field_eff_gap.push_back(mean_staircase_gap(radii_over_t, s.a, m, r.interior_lo, r.interior_hi, 1.0));
      } else {
        r.field_eff_gap.push_back(std::nan(""));
      }
    }
  }
  r.xi_dev = xi_deviation(h, r.f_inf, 1.0);
  r.xi_dev_half = xi_deviation(h, r.f_inf, 0.5);

  r.max_action_drift = *std::max_element(r.a_drift.begin(), r.a_drift.end());
  r.min_support_margin = *std::min_element(r.support_margin.begin(), r.support_margin.end());
  r.support_ok = r.min_support_margin >= 0.0;

  if (states.empty()) {
    r.conservation_ok = true;
  } else {
    r.conservation_drift = lp_conservation_check(states);
    r.conservation_ok = r.conservation_drift == 0.0;
  }

  // fits over the last decade(s); t = T itself is the reference and is left out
  const double t_lo = T / std::pow(10.0, cfg.fit_decades);
  const double M = r.f_inf.total_mass;
  double sup_f = 0.0;
  for (double a : last.a) sup_f = std::max(sup_f, std::fabs(r.f_inf(a)));
  const double lam = std::fabs(h.consts.lambda);
  const double a_floor = 1e-13 * std::max(1.0, amax);
  const double th_floor = 1e-13 * (1.0 + sup_theta + lam * std::log1p(T) * sup_f);
  const double mass_floor = 1e-13 * std::max(M, std::numeric_limits<double>::min());

  r.action_fit = fit_decay(r.times, r.a_dev, t_lo, T, a_floor);
  r.action_ok = r.action_fit.below_noise || (!r.action_fit.degenerate && r.action_fit.slope <= Thresholds::action_slope);

  r.xi_fit = fit_decay(r.times, r.xi_dev, t_lo, T, th_floor);
  r.xi_ok = r.xi_fit.below_noise || (!r.xi_fit.degenerate && r.xi_fit.slope <= Thresholds::xi_slope);

  r.w1_fit = fit_decay(r.times, r.w1, t_lo, T, mass_floor * (1.0 + sup_theta));
  r.w1_ok = r.w1_fit.below_noise || (!r.w1_fit.degenerate && r.w1_fit.slope <= Thresholds::w1_slope);

  if (interior_ok) {
    r.f_inf_fit = fit_decay(r.times, r.f_inf_gap, t_lo, T, mass_floor);
    r.f_inf_ok = !r.f_inf.warn &&
                 (r.f_inf_fit.below_noise || (!r.f_inf_fit.degenerate && r.f_inf_fit.slope <= Thresholds::f_inf_slope));
    r.field_eff_fit = fit_decay(r.times, r.field_eff_gap, Thresholds::field_eff_t_min, kInf, mass_floor);
    r.field_eff_ok = r.field_eff_fit.below_noise ||
                     (!r.field_eff_fit.degenerate && r.field_eff_fit.slope <= Thresholds::field_eff_slope);
  } else {
    r.f_inf_fit.degenerate = r.field_eff_fit.degenerate = true;
  }

  {
    std::vector<double> x, y, ratio;
    for (std::size_t k = 0; k < K; ++k) {
      if (r.times[k] < t_lo) continue;
      x.push_back(std::log1p(r.times[k]));
      y.push_back(r.theta_drift[k]);
      if (r.times[k] < T) ratio.push_back(r.xi_dev_half[k] / (std::log1p(T) - std::log1p(r.times[k])));
    }
    r.theta_growth = fit_line(x, y);
    r.theta_growth_ok = !r.theta_growth.degenerate && r.theta_growth.slope - r.theta_growth.half_width > 0.0;
    r.half_expected = 0.5 * lam * sup_f;
    if (!ratio.empty()) {
      const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
      r.half_spread = *lo > 0.0 ? *hi / *lo : kInf;
      r.half_level = median(ratio);
      r.half_control_ok = r.half_spread <= Thresholds::half_spread &&
                          r.half_level >= Thresholds::half_level_lo * r.half_expected &&
                          r.half_level <= Thresholds::half_level_hi * r.half_expected && r.half_expected > 0.0;
    }
  }

  if (K >= 2) {
    const std::size_t k = K - 2;
    r.xi_zeroed_ratio = r.xi_dev[k] > 0.0 ? r.theta_dev[k] / r.xi_dev[k] : (r.theta_dev[k] > 0.0 ? kInf : 0.0);
    r.xi_zeroed_ok = r.xi_zeroed_ratio >= Thresholds::xi_zeroed_factor;
  }

  if (r.tangent_min.empty()) {
    r.tangent_ok = true;
  } else {
    const double lo = *std::min_element(r.tangent_min.begin(), r.tangent_min.end());
    const double hi = *std::max_element(r.tangent_max.begin(), r.tangent_max.end());
    r.tangent_ok = lo >= Thresholds::tangent_lo && hi <= Thresholds::tangent_hi;
  }
  return r;
}

}  // namespace radvp
