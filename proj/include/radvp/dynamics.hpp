#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "radvp/ensemble.hpp"

namespace radvp {

struct StepOptions {
  bool self_interaction = true;
  bool parallel = true;  // OpenMP kernels; the serial ones give identical bits
};

// Explicit midpoint step.  Tangents, when given, ride along with the same stages.
void step(Ensemble& ens, double dt, const StepOptions& opts = {}, TangentState* tangents = nullptr);

// Tangents at t + dt for the step that starts at ens.
TangentState tangent_step(const Ensemble& ens, const TangentState& tangents, double dt,
                          const StepOptions& opts = {});

double support_margin(const Ensemble& ens);

struct Schedule {
  double t_end = 200.0;
  double dt_max = 0.05;
  double c_cfl = 0.02;
  double cadence = 2.0;
};

void validate(const Schedule& s);

// Step size at time t that does not cross next_output.
double next_dt(double t, double next_output, const Schedule& s);

struct Snapshot {
  double t = 0.0;
  std::vector<double> theta, a;
  std::vector<double> d_theta_da, d_a_da;  // empty without tangent flow
};

// Everything the diagnostics need: the invariant part of each marker once, plus
// (theta, a) at every output time.
struct History {
  std::vector<Marker> initial;
  PhysicalConstants consts;
  double eps = 0.0;
  double delta = 0.0;
  std::vector<Snapshot> snapshots;

  Ensemble ensemble_at(std::size_t k) const;
};

Snapshot take_snapshot(const Ensemble& ens, const TangentState* tangents);

struct RunOptions {
  StepOptions step;
  bool tangents = false;
  // called at the starting time and at every output time
  std::function<void(const Ensemble&, const TangentState*)> on_sample;
};

struct RunOutput {
  Ensemble final_state;
  TangentState tangents;
  History history;
  std::size_t steps = 0;
};

// Advances from ens.t to schedule.t_end.  A run resumed from a checkpoint at an
// output time takes exactly the steps the uninterrupted run would have taken.
RunOutput run(Ensemble ens, const Schedule& schedule, const RunOptions& opts,
              const TangentState* initial_tangents = nullptr);

}  // namespace radvp
