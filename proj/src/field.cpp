#include "radvp/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "radvp/errors.hpp"
#include "radvp/format.hpp"

namespace radvp {

double total_mass(const Ensemble& ens) {
  double m = 0.0;
  for (const Marker& mk : ens.markers) m += mass(mk);
  return m;
}

FieldView::FieldView(std::span<const double> radii, std::span<const double> masses, double t)
    : t_(t) {
  const std::size_t n = radii.size();
  if (masses.size() != n) throw InternalError("radii and masses differ in length");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::sort(order_.begin(), order_.end(), [&](std::uint32_t i, std::uint32_t j) {
    return radii[i] < radii[j] || (radii[i] == radii[j] && i < j);
  });
  radii_.resize(n);
  prefix_.resize(n);
  tail_.resize(n + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    radii_[k] = radii[order_[k]];
    acc += masses[order_[k]];
    prefix_[k] = acc;
  }
  tail_[n] = 0.0;
  for (std::size_t k = n; k-- > 0;) tail_[k] = tail_[k + 1] + masses[order_[k]] / radii_[k];
}

double FieldView::enclosed_mass(double r) const {
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  return it == radii_.begin() ? 0.0 : prefix_[static_cast<std::size_t>(it - radii_.begin()) - 1];
}

double FieldView::force(double r) const {
  if (!(r > 0.0)) throw DomainError("field query needs r > 0");
  const double m = enclosed_mass(r);
  return m == 0.0 ? 0.0 : -m / (r * r);
}

double FieldView::potential(double r) const {
  if (!(r > 0.0)) throw DomainError("potential query needs r > 0");
  const auto k = static_cast<std::size_t>(std::upper_bound(radii_.begin(), radii_.end(), r) - radii_.begin());
  const double inside = k == 0 ? 0.0 : prefix_[k - 1];
  return -(inside / r + tail_[k]);
}

double FieldView::sup_abs_force() const {
  // |F| = M(r)/r^2 decreases between radii, so the sup sits at a marker radius
  double best = 0.0;
  for (std::size_t k = 0; k < radii_.size(); ++k)
    best = std::max(best, prefix_[k] / (radii_[k] * radii_[k]));
  return best;
}

FieldView build_field_view(const Ensemble& ens, double t) {
  const std::size_t n = ens.markers.size();
  std::vector<double> radii(n), masses(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Marker& mk = ens.markers[i];
    radii[i] = shifted_radius({mk.theta, mk.a, mk.ell}, t, ens.consts, JetOrder::first).R;
    masses[i] = mass(mk);
  }
  return FieldView(radii, masses, t);
}

double force_at(const FieldView& view, double r) { return view.force(r); }
double potential_at(const FieldView& view, double r) { return view.potential(r); }

FieldView build_effective_view(const Ensemble& ens, double t) {
  if (!(t > 0.0)) throw DomainError("effective field needs t > 0");
  const std::size_t n = ens.markers.size();
  std::vector<double> radii(n), masses(n);
  for (std::size_t i = 0; i < n; ++i) {
    radii[i] = ens.markers[i].a * t;
    masses[i] = mass(ens.markers[i]);
  }
  return FieldView(radii, masses, t);
}

double effective_force_at(const Ensemble& ens, double t, double r) {
  if (!(r > 0.0)) throw DomainError("effective field needs r > 0");
  return build_effective_view(ens, t).force(r);
}

AAForce aa_force(const PhaseAA& q, double t, const FieldView& view, const PhysicalConstants& consts) {
  const RadialJet j = shifted_radius(q, t, consts, JetOrder::first);
  const double F = view.force(j.R);
  return {-consts.lambda * F * j.dR_da, consts.lambda * F * j.dR_dtheta};
}

double moment_weight(const Marker& mk, const MomentSpec& s) {
  return std::pow(japanese(mk.ell), s.ell) * std::pow(mk.ell, -s.inv_ell) *
         std::pow(mk.a + 1.0 / mk.a, s.action) * std::pow(japanese(mk.theta), s.angle);
}

double moment_norm(std::span<const Marker> markers, const MomentSpec& spec) {
  double acc = 0.0;
  for (const Marker& mk : markers) {
    const double v = moment_weight(mk, spec) * mk.g;
    if (spec.norm == NormKind::sup) acc = std::max(acc, std::fabs(v));
    else acc += mk.w * v * v;
  }
  return spec.norm == NormKind::sup ? acc : std::sqrt(acc);
}

double moment_norm(const Ensemble& ens, const MomentSpec& spec) {
  return moment_norm(std::span<const Marker>(ens.markers), spec);
}

void write_field_snapshot(std::ostream& os, const Ensemble& ens, std::span<const double> r_grid) {
  const FieldView view = build_field_view(ens, ens.t);
  const bool has_eff = ens.t > 0.0;
  const FieldView eff = has_eff ? build_effective_view(ens, ens.t) : FieldView{};
  os << "r,F,psi,F_eff\n";
  for (double r : r_grid) {
    os << fmt_double(r) << ',' << fmt_double(view.force(r)) << ',' << fmt_double(view.potential(r))
       << ',' << (has_eff ? fmt_double(eff.force(r)) : std::string("nan")) << '\n';
  }
}

}  // namespace radvp
