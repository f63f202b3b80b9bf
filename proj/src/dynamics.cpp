#include "radvp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radvp/errors.hpp"
#include "radvp/kernels.hpp"

namespace radvp {

namespace {

struct Workspace {
  kernels::JetArrays jets;
  kernels::Rates rates;
  std::vector<double> masses;
  std::vector<double> own;
};

void stage(const std::vector<Marker>& markers, double t, const Ensemble& ens, const StepOptions& opts,
           std::span<const double> x, std::span<const double> y, Workspace& ws) {
  const bool tangents = !x.empty();
  const JetOrder order = tangents ? JetOrder::second : JetOrder::first;
  try {
    if (opts.parallel)
      kernels::omp::shifted_jets(markers, t, ens.consts, order, ws.jets);
    else
      kernels::serial::shifted_jets(markers, t, ens.consts, order, ws.jets);
  } catch (const DomainError& e) {
    throw SupportViolation(std::string("marker left the admissible domain inside a step: ") + e.what());
  }
  const FieldView view(ws.jets.R, ws.masses, t);
  kernels::RateInputs in;
  in.view = &view;
  in.jets = &ws.jets;
  if (!opts.self_interaction) in.own_mass = ws.own;
  in.lambda = ens.consts.lambda;
  in.x = x;
  in.y = y;
  in.mollifier = (1.0 + t) / std::sqrt(static_cast<double>(std::max<std::size_t>(markers.size(), 1)));
  if (opts.parallel)
    kernels::omp::rates(in, ws.rates);
  else
    kernels::serial::rates(in, ws.rates);
}

void check_support(const Ensemble& ens) {
  const double floor = 0.5 * ens.delta;
  for (std::size_t i = 0; i < ens.markers.size(); ++i) {
    const Marker& mk = ens.markers[i];
    if (!(mk.a * std::sqrt(japanese(mk.ell)) >= floor))
      throw SupportViolation("marker " + std::to_string(i) + " at t=" + std::to_string(ens.t) +
                             " has a<ell>^(1/2) below delta/2");
  }
}

}  // namespace

double support_margin(const Ensemble& ens) {
  double lo = std::numeric_limits<double>::infinity();
  for (const Marker& mk : ens.markers) lo = std::min(lo, mk.a * std::sqrt(japanese(mk.ell)));
  return lo - 0.5 * ens.delta;
}

void step(Ensemble& ens, double dt, const StepOptions& opts, TangentState* tangents) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step size must be positive and finite");
  const std::size_t n = ens.markers.size();
  if (tangents && (tangents->d_theta_da.size() != n || tangents->d_a_da.size() != n))
    throw DomainError("tangent state does not match the ensemble");
  if (n == 0) {
    ens.t += dt;
    return;
  }
  Workspace ws;
  ws.masses.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.masses[i] = mass(ens.markers[i]);
  if (!opts.self_interaction) ws.own = ws.masses;

  std::span<const double> x0, y0;
  if (tangents) {
    x0 = tangents->d_theta_da;
    y0 = tangents->d_a_da;
  }
  stage(ens.markers, ens.t, ens, opts, x0, y0, ws);

  const double h = 0.5 * dt;
  std::vector<Marker> mid = ens.markers;
  std::vector<double> xm, ym;
  for (std::size_t i = 0; i < n; ++i) {
    mid[i].theta += h * ws.rates.theta[i];
    mid[i].a += h * ws.rates.a[i];
  }
  if (tangents) {
    xm.resize(n);
    ym.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      xm[i] = x0[i] + h * ws.rates.x[i];
      ym[i] = y0[i] + h * ws.rates.y[i];
    }
  }
  stage(mid, ens.t + h, ens, opts, xm, ym, ws);

  for (std::size_t i = 0; i < n; ++i) {
    ens.markers[i].theta += dt * ws.rates.theta[i];
    ens.markers[i].a += dt * ws.rates.a[i];
  }
  if (tangents) {
    for (std::size_t i = 0; i < n; ++i) {
      tangents->d_theta_da[i] += dt * ws.rates.x[i];
      tangents->d_a_da[i] += dt * ws.rates.y[i];
    }
  }
  ens.t += dt;
  check_support(ens);
}

TangentState tangent_step(const Ensemble& ens, const TangentState& tangents, double dt, const StepOptions& opts) {
  Ensemble copy = ens;
  TangentState out = tangents;
  step(copy, dt, opts, &out);
  return out;
}

void validate(const Schedule& s) {
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) throw ConfigError("t_end must be finite and >= 0");
  if (!(s.dt_max > 0.0) || !std::isfinite(s.dt_max)) throw ConfigError("dt_max must be positive");
  if (!(s.c_cfl > 0.0) || !std::isfinite(s.c_cfl)) throw ConfigError("c_cfl must be positive");
  if (!(s.cadence > 0.0) || !std::isfinite(s.cadence)) throw ConfigError("output cadence must be positive");
}

double next_dt(double t, double next_output, const Schedule& s) {
  const double policy = std::min(s.dt_max, s.c_cfl * (1.0 + t));
  const double remaining = next_output - t;
  if (remaining - policy < 1e-6 * policy) return remaining;
  return policy;
}

Ensemble History::ensemble_at(std::size_t k) const {
  const Snapshot& s = snapshots.at(k);
  Ensemble e;
  e.markers = initial;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    e.markers[i].theta = s.theta[i];
    e.markers[i].a = s.a[i];
  }
  e.consts = consts;
  e.eps = eps;
  e.delta = delta;
  e.t = s.t;
  return e;
}

Snapshot take_snapshot(const Ensemble& ens, const TangentState* tangents) {
  Snapshot s;
  s.t = ens.t;
  s.theta.reserve(ens.markers.size());
  s.a.reserve(ens.markers.size());
  for (const Marker& mk : ens.markers) {
    s.theta.push_back(mk.theta);
    s.a.push_back(mk.a);
  }
  if (tangents) {
    s.d_theta_da = tangents->d_theta_da;
    s.d_a_da = tangents->d_a_da;
  }
  return s;
}

RunOutput run(Ensemble ens, const Schedule& schedule, const RunOptions& opts, const TangentState* initial_tangents) {
  validate(schedule);
  validate(ens.consts);
  RunOutput out;
  out.history.initial = ens.markers;
  out.history.consts = ens.consts;
  out.history.eps = ens.eps;
  out.history.delta = ens.delta;
  if (opts.tangents)
    out.tangents = initial_tangents ? *initial_tangents : TangentState::identity(ens.markers.size());
  TangentState* tan = opts.tangents ? &out.tangents : nullptr;

  check_support(ens);
  auto sample = [&] {
    out.history.snapshots.push_back(take_snapshot(ens, tan));
    if (opts.on_sample) opts.on_sample(ens, tan);
  };

  // output times are k * cadence, computed by multiplication so a resumed run
  // sees the same targets
  auto k = static_cast<long long>(std::floor(ens.t / schedule.cadence + 1e-9));
  sample();

  while (ens.t < schedule.t_end) {
    const double target = std::min(static_cast<double>(k + 1) * schedule.cadence, schedule.t_end);
    for (;;) {
      const double dt = next_dt(ens.t, target, schedule);
      const bool last = dt == target - ens.t;
      step(ens, dt, opts.step, tan);
      ++out.steps;
      if (last) break;
    }
    ens.t = target;
    ++k;
    sample();
  }
  out.final_state = std::move(ens);
  return out;
}

}  // namespace radvp
