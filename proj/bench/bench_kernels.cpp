// Serial reference kernels against their OpenMP versions on the default ensemble.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

#include "radvp/config.hpp"
#include "radvp/dynamics.hpp"
#include "radvp/kernels.hpp"

using namespace radvp;

namespace {

const Ensemble& ensemble() {
  static const Ensemble e = synthesize_initial(default_config()).ensemble;
  return e;
}

constexpr double kTime = 20.0;

template <bool Parallel>
void BM_ShiftedJets(benchmark::State& state) {
  const Ensemble& e = ensemble();
  const auto order = state.range(0) ? JetOrder::second : JetOrder::first;
  kernels::JetArrays jets;
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::shifted_jets(e.markers, kTime, e.consts, order, jets);
    else
      kernels::serial::shifted_jets(e.markers, kTime, e.consts, order, jets);
    benchmark::DoNotOptimize(jets.R.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(e.markers.size()));
}

template <bool Parallel>
void BM_Rates(benchmark::State& state) {
  const Ensemble& e = ensemble();
  const std::size_t n = e.markers.size();
  kernels::JetArrays jets;
  kernels::serial::shifted_jets(e.markers, kTime, e.consts, JetOrder::second, jets);
  std::vector<double> masses(n);
  for (std::size_t i = 0; i < n; ++i) masses[i] = mass(e.markers[i]);
  const FieldView view(jets.R, masses, kTime);
  const TangentState tan = TangentState::identity(n);
  kernels::RateInputs in;
  in.view = &view;
  in.jets = &jets;
  in.lambda = e.consts.lambda;
  if (state.range(0)) {
    in.x = tan.d_theta_da;
    in.y = tan.d_a_da;
  }
  in.mollifier = (1.0 + kTime) / std::sqrt(static_cast<double>(n));
  kernels::Rates rates;
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::rates(in, rates);
    else
      kernels::serial::rates(in, rates);
    benchmark::DoNotOptimize(rates.theta.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

void BM_FullStep(benchmark::State& state) {
  StepOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) {
    state.PauseTiming();
    Ensemble e = ensemble();
    TangentState tan = TangentState::identity(e.markers.size());
    state.ResumeTiming();
    step(e, 0.02, opts, &tan);
    benchmark::DoNotOptimize(e.markers.data());
  }
}

}  // namespace

// Arg: 0 = first-order jets / no tangents, 1 = second order / with tangents.
BENCHMARK(BM_ShiftedJets<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ShiftedJets<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Rates<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Rates<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_FullStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
