#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "radvp/action_angle.hpp"
#include "radvp/ensemble.hpp"

namespace radvp {

// Radial field of an atomic mass distribution: sorted radii with running masses.
// Ties are broken by marker index, and prefix sums run in sorted order, so the
// view is a deterministic function of its input sequence.
class FieldView {
 public:
  FieldView() = default;
  FieldView(std::span<const double> radii, std::span<const double> masses, double t);

  double t() const { return t_; }
  double total_mass() const { return prefix_.empty() ? 0.0 : prefix_.back(); }
  std::size_t size() const { return radii_.size(); }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& prefix_mass() const { return prefix_; }
  const std::vector<std::uint32_t>& order() const { return order_; }

  // sum of masses with radius <= r
  double enclosed_mass(double r) const;
  double force(double r) const;
  double potential(double r) const;
  // sup over r of |F(r)|
  double sup_abs_force() const;

 private:
  std::vector<double> radii_;
  std::vector<double> prefix_;
  std::vector<double> tail_;  // tail_[k] = sum_{j >= k} m_j / R_j
  std::vector<std::uint32_t> order_;
  double t_ = 0.0;
};

FieldView build_field_view(const Ensemble& ens, double t);
double force_at(const FieldView& view, double r);
double potential_at(const FieldView& view, double r);

// Free-streaming approximation: radii a_i t.
FieldView build_effective_view(const Ensemble& ens, double t);
double effective_force_at(const Ensemble& ens, double t, double r);

struct AAForce {
  double dtheta_dt = 0.0;
  double da_dt = 0.0;
};
AAForce aa_force(const PhaseAA& q, double t, const FieldView& view, const PhysicalConstants& consts);

enum class NormKind { sup, l2 };

struct MomentSpec {
  int ell = 0;      // power of <ell>
  int inv_ell = 0;  // power of 1/ell
  int action = 0;   // power of (a + 1/a)
  int angle = 0;    // power of <theta>
  NormKind norm = NormKind::sup;
};

double moment_weight(const Marker& mk, const MomentSpec& spec);
double moment_norm(const Ensemble& ens, const MomentSpec& spec);
double moment_norm(std::span<const Marker> markers, const MomentSpec& spec);

// CSV with columns r, F, psi, F_eff.
void write_field_snapshot(std::ostream& os, const Ensemble& ens, std::span<const double> r_grid);

}  // namespace radvp
