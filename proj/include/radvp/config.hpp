#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "radvp/dynamics.hpp"
#include "radvp/field.hpp"

namespace radvp {

inline constexpr int kSchemaVersion = 1;

// One factor of the separable initial bump: exp(1 - 1/(1 - s^2)) with
// s = (x - center) / half_width, zero outside.
struct BumpAxis {
  double center = 0.0;
  double half_width = 1.0;
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
};

double bump(double x, const BumpAxis& ax);

struct GridSize {
  int n_theta = 33;
  int n_a = 33;
  int n_ell = 9;
};

struct AnalysisConfig {
  int a_grid_points = 65;
  double f_inf_tolerance = 0.05;  // relative, on the support interior
  double fit_decades = 1.0;       // fits use t in [T / 10^fit_decades, T]
  double interior_fraction = 0.2; // trimmed from each end of the action support
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  PhysicalConstants consts;
  double eps = 0.1;
  double delta = 0.5;
  double regime_guard = 0.5;  // eps <= regime_guard * delta^2
  BumpAxis theta{0.0, 1.0};
  BumpAxis a{1.5, 0.5};
  BumpAxis ell{1.25, 0.75};
  MomentSpec normalization;             // rescaled so this moment equals eps
  std::vector<MomentSpec> moments;      // reported in the time series
  GridSize grid;
  Schedule schedule;
  bool self_interaction = true;
  bool tangents = true;
  bool deterministic = true;
  std::string checkpoint_format = "binary";  // or "csv"
  AnalysisConfig analysis;
};

RunConfig default_config();

nlohmann::json to_json(const RunConfig& cfg);
// Missing keys keep their defaults; unknown keys and bad values are ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Throws ConfigError.  The regime guard is skipped when override_guard is set.
void validate(const RunConfig& cfg, bool override_guard = false);

struct InitialData {
  Ensemble ensemble;
  double scale = 1.0;                    // factor applied to the raw bump
  std::vector<double> achieved_moments;  // normalization first, then cfg.moments
};

InitialData synthesize_initial(const RunConfig& cfg);

}  // namespace radvp
