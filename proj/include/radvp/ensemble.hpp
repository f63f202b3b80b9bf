#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "radvp/kepler.hpp"

namespace radvp {

struct Marker {
  double theta = 0.0;
  double a = 0.0;
  double ell = 0.0;
  double w = 0.0;  // phase-space volume of the cell
  double g = 0.0;  // carried density value
  std::uint32_t group = 0;  // initial (a, ell) cell
};

inline double mass(const Marker& mk) { return mk.w * mk.g * mk.g; }

struct Ensemble {
  std::vector<Marker> markers;
  PhysicalConstants consts;
  double eps = 0.0;
  double delta = 0.0;
  double t = 0.0;
};

// Sum of w g^2 in marker order.
double total_mass(const Ensemble& ens);

// <x> = sqrt(2 + x^2)
inline double japanese(double x) { return std::sqrt(2.0 + x * x); }

struct TangentState {
  std::vector<double> d_theta_da;
  std::vector<double> d_a_da;

  static TangentState identity(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  }
};

}  // namespace radvp
