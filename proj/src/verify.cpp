#include "radvp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "radvp/action_angle.hpp"
#include "radvp/checkpoint.hpp"
#include "radvp/config.hpp"
#include "radvp/diagnostics.hpp"
#include "radvp/dynamics.hpp"
#include "radvp/errors.hpp"
#include "radvp/field.hpp"

namespace radvp {

namespace {

struct Check {
  const char* name;
  std::function<bool(std::string&)> body;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return v;
}

bool anomaly_asymptotics(std::string& msg) {
  const double kappa = 0.5;
  const double x = 1e-4;
  const double ratio = (h_kappa(kappa, x) - 1.0) / (x * x / (2.0 * (1.0 - kappa) * (1.0 - kappa)));
  double lo = 1e300, hi = -1e300;
  for (double xx : logspace(10.0, 1e6, 41)) {
    const double r = h_kappa_large_x_residual(kappa, xx);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  msg = "small-x ratio " + sci(ratio) + ", large-x residual in [" + sci(lo) + ", " +
        sci(hi) + "]";
  return std::fabs(ratio - 1.0) <= 1e-3 && std::isfinite(lo) && hi - lo < 1.0;
}

bool round_trip(std::string& msg) {
  const PhysicalConstants c;
  double worst = 0.0;
  for (double a : {0.3, 1.0, 3.0})
    for (double ell : {0.2, 1.0, 5.0})
      for (double th : {-50.0, -1.0, -1e-3, 1e-3, 0.7, 40.0}) {
        const PhaseAA q{th, a, ell};
        const PhaseAA back = to_aa(to_phys(q, c), c);
        worst = std::max({worst, std::fabs(back.theta - th) / std::max(1.0, std::fabs(th)),
                          std::fabs(back.a - a) / a});
      }
  msg = "worst relative error " + sci(worst);
  return worst <= 1e-9;
}

bool canonicity(std::string& msg) {
  const PhysicalConstants c;
  double worst = 0.0;
  for (double a : logspace(0.1, 10.0, 7))
    for (double ell : logspace(0.1, 10.0, 7))
      for (double th : {-100.0, -3.0, -0.01, 0.01, 2.0, 100.0}) worst = std::max(worst, symplectic_defect({th, a, ell}, c));
  msg = "worst defect " + sci(worst);
  return worst <= 1e-8;
}

bool closed_form_flow(std::string& msg) {
  const PhysicalConstants c;
  double worst = 0.0;
  for (const PhaseAA q : {PhaseAA{-2.0, 1.0, 1.0}, PhaseAA{0.5, 0.5, 2.0}, PhaseAA{-10.0, 2.0, 0.3}}) {
    const PhasePhys x0 = to_phys(q, c);
    const double t = 20.0;
    const PhasePhys ode = kepler_ode_oracle(x0, t, 1e-3, c);
    const PhasePhys exact = to_phys({q.theta + q.a * t, q.a, q.ell}, c);
    worst = std::max(worst, std::fabs(ode.r - exact.r) / exact.r);
  }
  msg = "worst relative radius gap " + sci(worst);
  return worst <= 1e-6;
}

std::vector<double> random_radii(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::vector<double> r(n);
  for (double& x : r) x = u(rng);
  r[n / 2] = r[n / 3];  // a tie
  return r;
}

bool field_brute_force(std::string& msg) {
  std::mt19937_64 rng(12345);
  const std::size_t n = 1000;
  const std::vector<double> radii = random_radii(n, rng);
  std::vector<double> masses(n);
  std::uniform_real_distribution<double> u(0.0, 1e-3);
  for (double& m : masses) m = u(rng);
  const FieldView view(radii, masses, 0.0);
  std::size_t bad = 0;
  for (double r : radii) {
    std::vector<std::pair<double, std::uint32_t>> inside;
    for (std::size_t i = 0; i < n; ++i)
      if (radii[i] <= r) inside.push_back({radii[i], static_cast<std::uint32_t>(i)});
    std::sort(inside.begin(), inside.end());
    double m = 0.0;
    for (const auto& [ri, i] : inside) m += masses[i];
    if (view.enclosed_mass(r) != m) ++bad;
  }
  msg = std::to_string(bad) + " mismatches out of " + std::to_string(n);
  return bad == 0;
}

bool potential_consistency(std::string& msg) {
  std::mt19937_64 rng(777);
  const std::size_t n = 200;
  const std::vector<double> radii = random_radii(n, rng);
  const std::vector<double> masses(n, 1.0 / n);
  const FieldView view(radii, masses, 0.0);
  double worst = 0.0;
  for (double r : logspace(0.05, 20.0, 60)) {
    const double h = 1e-6 * r;
    if (view.enclosed_mass(r - h) != view.enclosed_mass(r + h)) continue;  // straddles a shell
    const double fd = (view.potential(r + h) - view.potential(r - h)) / (2.0 * h);
    worst = std::max(worst, std::fabs(-fd - view.force(r)) / std::max(1.0, std::fabs(view.force(r))));
  }
  msg = "worst |dpsi/dr + F| " + sci(worst);
  return worst <= 1e-6;
}

Ensemble small_ensemble(double lambda) {
  RunConfig cfg = default_config();
  cfg.grid = {5, 4, 3};
  cfg.consts.lambda = lambda;
  return synthesize_initial(cfg).ensemble;
}

bool frozen_at_zero_coupling(std::string& msg) {
  Ensemble e = small_ensemble(0.0);
  const Ensemble start = e;
  TangentState tan = TangentState::identity(e.markers.size());
  for (int k = 0; k < 20; ++k) step(e, 0.05, {}, &tan);
  bool same = true;
  for (std::size_t i = 0; i < e.markers.size(); ++i)
    same = same && e.markers[i].theta == start.markers[i].theta && e.markers[i].a == start.markers[i].a &&
           tan.d_theta_da[i] == 0.0 && tan.d_a_da[i] == 1.0;
  msg = same ? "markers and tangents unchanged" : "markers moved";
  return same;
}

bool single_marker_fixed(std::string& msg) {
  Ensemble e;
  e.markers.push_back({0.3, 1.2, 0.8, 0.5, 0.2, 0});
  e.delta = 0.5;
  const Marker start = e.markers[0];
  StepOptions opts;
  opts.self_interaction = false;
  for (int k = 0; k < 50; ++k) step(e, 0.1, opts);
  const bool ok = e.markers[0].theta == start.theta && e.markers[0].a == start.a;
  msg = ok ? "fixed point" : "marker drifted";
  return ok;
}

bool checkpoint_round_trip(std::string& msg) {
  namespace fs = std::filesystem;
  Ensemble e = small_ensemble(1.0);
  e.t = 1.0 / 3.0;
  TangentState tan = TangentState::identity(e.markers.size());
  tan.d_theta_da[1] = -1e-300;
  const fs::path dir = fs::temp_directory_path() / ("radvp_verify_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  bool ok = true;
  for (CheckpointFormat f : {CheckpointFormat::binary, CheckpointFormat::csv}) {
    const std::string p = (dir / checkpoint_file_name(0, f)).string();
    write_checkpoint(p, e, &tan, f);
    const Checkpoint c = read_checkpoint(p);
    ok = ok && c.ensemble.t == e.t && c.tangents && c.tangents->d_theta_da == tan.d_theta_da &&
         c.ensemble.markers.size() == e.markers.size();
    for (std::size_t i = 0; ok && i < e.markers.size(); ++i) {
      const Marker &x = e.markers[i], &y = c.ensemble.markers[i];
      ok = x.theta == y.theta && x.a == y.a && x.ell == y.ell && x.w == y.w && x.g == y.g && x.group == y.group;
    }
  }
  fs::remove_all(dir);
  msg = ok ? "binary and CSV reload bit-exactly" : "reload differs";
  return ok;
}

bool wasserstein_translation(std::string& msg) {
  const Ensemble e = small_ensemble(1.0);
  Ensemble moved = e;
  for (Marker& mk : moved.markers) mk.theta += 0.25;
  const double w = weak_convergence_metric(e, moved, nullptr);
  const double want = 0.25 * total_mass(e);
  msg = "W1 " + sci(w) + " vs " + sci(want);
  return std::fabs(w - want) <= 1e-12 * want && weak_convergence_metric(e, e, nullptr) == 0.0;
}

bool conservation_guard(std::string& msg) {
  const Ensemble e = small_ensemble(1.0);
  Ensemble bad = e;
  bad.markers[2].g *= 1.0 + 1e-15;
  const std::vector<Ensemble> clean{e, e};
  const std::vector<Ensemble> mutated{e, bad};
  bool caught = false;
  try {
    lp_conservation_check(mutated);
  } catch (const InternalError&) {
    caught = true;
  }
  msg = caught ? "mutation detected" : "mutation missed";
  return caught && lp_conservation_check(clean) == 0.0;
}

bool normalization(std::string& msg) {
  const RunConfig cfg = default_config();
  const InitialData init = synthesize_initial(cfg);
  const double err = std::fabs(init.achieved_moments.front() - cfg.eps) / cfg.eps;
  msg = "relative error " + sci(err) + ", margin " + sci(support_margin(init.ensemble));
  return err <= 1e-12 && support_margin(init.ensemble) >= 0.5 * cfg.delta;
}

}  // namespace

int run_verify(std::ostream& os) {
  const std::vector<Check> checks{
      {"kepler: H_kappa asymptotics", anomaly_asymptotics},
      {"action_angle: round trip", round_trip},
      {"action_angle: canonicity", canonicity},
      {"action_angle: closed form vs ODE", closed_form_flow},
      {"field: prefix sums vs brute force", field_brute_force},
      {"field: potential/force consistency", potential_consistency},
      {"dynamics: lambda = 0 fixed points", frozen_at_zero_coupling},
      {"dynamics: single marker without self force", single_marker_fixed},
      {"cli_io: checkpoint round trip", checkpoint_round_trip},
      {"cli_io: initial normalization", normalization},
      {"diagnostics: W1 of a translate", wasserstein_translation},
      {"diagnostics: conservation guard", conservation_guard},
  };
  int failures = 0;
  for (const Check& c : checks) {
    std::string msg;
    bool ok = false;
    try {
      ok = c.body(msg);
    } catch (const std::exception& e) {
      msg = std::string("threw: ") + e.what();
    }
    if (!ok) ++failures;
    os << (ok ? "PASS " : "FAIL ") << c.name << ": " << msg << '\n';
  }
  return failures;
}

}  // namespace radvp
