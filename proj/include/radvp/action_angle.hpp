#pragma once

#include "radvp/kepler.hpp"

namespace radvp {

struct PhaseAA {
  double theta = 0.0;
  double a = 0.0;
  double ell = 0.0;
};

struct PhasePhys {
  double r = 0.0;
  double v = 0.0;
  double ell = 0.0;
};

struct RadialJet {
  double R = 0.0;
  double dR_dtheta = 0.0;
  double dR_da = 0.0;
  double d2R_dtheta2 = 0.0;
  double d2R_dthetada = 0.0;
  double d2R_da2 = 0.0;
  // theta == 0: odd derivatives are the right limits (sgn 0 = +1).
  bool at_symmetry_point = false;
};

enum class JetOrder { first = 1, second = 2 };

PhasePhys to_phys(const PhaseAA& q, const PhysicalConstants& consts);
PhaseAA to_aa(const PhasePhys& x, const PhysicalConstants& consts);

RadialJet radial_jet(const PhaseAA& q, const PhysicalConstants& consts,
                     JetOrder order = JetOrder::second);
RadialJet radial_jet(double theta, const KeplerParams& k, const PhysicalConstants& consts,
                     JetOrder order = JetOrder::second);

// Jet of (theta, a) -> R(theta + a t, a, ell).
RadialJet shifted_radius(const PhaseAA& q, double t, const PhysicalConstants& consts,
                         JetOrder order = JetOrder::second);
RadialJet shifted_radius(const PhaseAA& q, double t, const KeplerParams& k,
                         const PhysicalConstants& consts, JetOrder order = JetOrder::second);

// Adaptive RK4 (step doubling) on r' = v, v' = ell/r^3 - m/(2 r^2).
// dt is the initial step; negative t_end integrates backwards.
struct OdeOracleOptions {
  double rtol = 1e-12;
  double min_step = 1e-14;
};
PhasePhys kepler_ode_oracle(const PhasePhys& x0, double t_end, double dt,
                            const PhysicalConstants& consts, const OdeOracleOptions& opts = {});

// |det d(R,V)/d(theta,a) - 1|.
double symplectic_defect(const PhaseAA& q, const PhysicalConstants& consts);
double symplectic_defect_shifted(const PhaseAA& q, double t, const PhysicalConstants& consts);

}  // namespace radvp
