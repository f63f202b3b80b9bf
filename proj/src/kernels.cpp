#include "radvp/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>

namespace radvp::kernels {

void JetArrays::resize(std::size_t n, JetOrder order) {
  R.resize(n);
  Rt.resize(n);
  Ra.resize(n);
  const std::size_t n2 = order == JetOrder::second ? n : 0;
  Rtt.resize(n2);
  Rta.resize(n2);
  Raa.resize(n2);
}

void Rates::resize(std::size_t n, bool tangents) {
  theta.resize(n);
  a.resize(n);
  x.resize(tangents ? n : 0);
  y.resize(tangents ? n : 0);
}

namespace {

inline void jet_one(const Marker& mk, double t, const PhysicalConstants& consts, JetOrder order,
                    JetArrays& out, std::size_t i) {
  const KeplerParams k = derive_params(mk.a, mk.ell, consts);
  const RadialJet j = shifted_radius({mk.theta, mk.a, mk.ell}, t, k, consts, order);
  out.R[i] = j.R;
  out.Rt[i] = j.dR_dtheta;
  out.Ra[i] = j.dR_da;
  if (order == JetOrder::second) {
    out.Rtt[i] = j.d2R_dtheta2;
    out.Rta[i] = j.d2R_dthetada;
    out.Raa[i] = j.d2R_da2;
  }
}

inline double force_excluding(const FieldView& v, double r, double own, double r_own) {
  double m = v.enclosed_mass(r);
  if (own > 0.0 && r_own <= r) m -= own;
  return -m / (r * r);
}

inline void rate_one(const RateInputs& in, Rates& out, std::size_t i) {
  const JetArrays& j = *in.jets;
  const double own = in.own_mass.empty() ? 0.0 : in.own_mass[i];
  const double R = j.R[i];
  const double F = force_excluding(*in.view, R, own, R);
  out.theta[i] = -in.lambda * F * j.Ra[i];
  out.a[i] = in.lambda * F * j.Rt[i];
  if (in.x.empty()) return;
  const double dF = mollified_dfdr(*in.view, R, in.mollifier, own, R);
  const double Rt = j.Rt[i], Ra = j.Ra[i];
  const double p_tt = -dF * Rt * Rt - F * j.Rtt[i];
  const double p_at = -dF * Rt * Ra - F * j.Rta[i];
  const double p_aa = -dF * Ra * Ra - F * j.Raa[i];
  const double X = in.x[i], Y = in.y[i];
  out.x[i] = in.lambda * (p_at * X + p_aa * Y);
  out.y[i] = -in.lambda * (p_tt * X + p_at * Y);
}

// Exceptions must not cross the parallel region; the first one is rethrown after it.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr err;
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(radvp_kernel_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

double mollified_dfdr(const FieldView& view, double r, double half_width, double own, double r_own) {
  const double hi = r + half_width;
  const double lo = std::max(r - half_width, 0.5 * r);
  return (force_excluding(view, hi, own, r_own) - force_excluding(view, lo, own, r_own)) / (hi - lo);
}

namespace serial {

void shifted_jets(std::span<const Marker> markers, double t, const PhysicalConstants& consts,
                  JetOrder order, JetArrays& out) {
  out.resize(markers.size(), order);
  for (std::size_t i = 0; i < markers.size(); ++i) jet_one(markers[i], t, consts, order, out, i);
}

void rates(const RateInputs& in, Rates& out) {
  const std::size_t n = in.jets->R.size();
  out.resize(n, !in.x.empty());
  for (std::size_t i = 0; i < n; ++i) rate_one(in, out, i);
}

}  // namespace serial

namespace omp {

void shifted_jets(std::span<const Marker> markers, double t, const PhysicalConstants& consts,
                  JetOrder order, JetArrays& out) {
  out.resize(markers.size(), order);
  parallel_for(markers.size(), [&](std::size_t i) { jet_one(markers[i], t, consts, order, out, i); });
}

void rates(const RateInputs& in, Rates& out) {
  const std::size_t n = in.jets->R.size();
  out.resize(n, !in.x.empty());
  parallel_for(n, [&](std::size_t i) { rate_one(in, out, i); });
}

}  // namespace omp

}  // namespace radvp::kernels
