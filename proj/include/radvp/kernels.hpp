#pragma once

#include <span>
#include <vector>

#include "radvp/action_angle.hpp"
#include "radvp/ensemble.hpp"
#include "radvp/field.hpp"

// Per-marker kernels of the time step.  Every kernel exists as a plain serial
// loop and as an OpenMP loop; both write each output slot from one marker only,
// so their results are bit-identical for any thread count.
namespace radvp::kernels {

struct JetArrays {
  std::vector<double> R, Rt, Ra, Rtt, Rta, Raa;
  void resize(std::size_t n, JetOrder order);
};

struct Rates {
  std::vector<double> theta, a;  // d theta/dt, d a/dt
  std::vector<double> x, y;      // tangent rates
  void resize(std::size_t n, bool tangents);
};

struct RateInputs {
  const FieldView* view = nullptr;
  const JetArrays* jets = nullptr;
  std::span<const double> own_mass;  // empty: a marker feels its own mass
  double lambda = 1.0;
  // tangent flow; empty spans switch it off
  std::span<const double> x, y;
  double mollifier = 0.0;  // half-width of the difference for dF/dr
};

namespace serial {
void shifted_jets(std::span<const Marker> markers, double t, const PhysicalConstants& consts,
                  JetOrder order, JetArrays& out);
void rates(const RateInputs& in, Rates& out);
}  // namespace serial

namespace omp {
void shifted_jets(std::span<const Marker> markers, double t, const PhysicalConstants& consts,
                  JetOrder order, JetArrays& out);
void rates(const RateInputs& in, Rates& out);
}  // namespace omp

// Mollified dF/dr at r, excluding a point mass `own` sitting at r_own when own > 0.
double mollified_dfdr(const FieldView& view, double r, double half_width, double own, double r_own);

}  // namespace radvp::kernels
