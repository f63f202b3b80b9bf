#include "radvp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "radvp/errors.hpp"

namespace radvp {

using nlohmann::json;

double bump(double x, const BumpAxis& ax) {
  const double s = (x - ax.center) / ax.half_width;
  if (!(std::fabs(s) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

RunConfig default_config() {
  RunConfig c;
  c.moments = {MomentSpec{}, MomentSpec{0, 0, 0, 0, NormKind::l2}, MomentSpec{32, 1, 32, 0, NormKind::sup},
               MomentSpec{16, 0, 16, 1, NormKind::l2}};
  return c;
}

namespace {

const char* norm_name(NormKind k) { return k == NormKind::sup ? "sup" : "l2"; }

json moment_json(const MomentSpec& m) {
  return {{"ell", m.ell}, {"inv_ell", m.inv_ell}, {"action", m.action}, {"angle", m.angle}, {"norm", norm_name(m.norm)}};
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

MomentSpec moment_from(const json& j, const std::string& where) {
  reject_unknown(j, {"ell", "inv_ell", "action", "angle", "norm"}, where);
  MomentSpec m;
  get(j, "ell", m.ell, where);
  get(j, "inv_ell", m.inv_ell, where);
  get(j, "action", m.action, where);
  get(j, "angle", m.angle, where);
  std::string norm = "sup";
  get(j, "norm", norm, where);
  if (norm == "sup")
    m.norm = NormKind::sup;
  else if (norm == "l2")
    m.norm = NormKind::l2;
  else
    throw ConfigError("norm must be 'sup' or 'l2' in " + where);
  return m;
}

BumpAxis axis_from(const json& j, BumpAxis ax, const std::string& where) {
  reject_unknown(j, {"center", "half_width"}, where);
  get(j, "center", ax.center, where);
  get(j, "half_width", ax.half_width, where);
  return ax;
}

}  // namespace

json to_json(const RunConfig& c) {
  json moments = json::array();
  for (const MomentSpec& m : c.moments) moments.push_back(moment_json(m));
  return {
      {"schema_version", c.schema_version},
      {"m", c.consts.m},
      {"lambda", c.consts.lambda},
      {"eps", c.eps},
      {"delta", c.delta},
      {"regime_guard", c.regime_guard},
      {"bump",
       {{"theta", {{"center", c.theta.center}, {"half_width", c.theta.half_width}}},
        {"a", {{"center", c.a.center}, {"half_width", c.a.half_width}}},
        {"ell", {{"center", c.ell.center}, {"half_width", c.ell.half_width}}}}},
      {"normalization", moment_json(c.normalization)},
      {"moments", moments},
      {"grid", {{"n_theta", c.grid.n_theta}, {"n_a", c.grid.n_a}, {"n_ell", c.grid.n_ell}}},
      {"schedule",
       {{"t_end", c.schedule.t_end},
        {"dt_max", c.schedule.dt_max},
        {"c_cfl", c.schedule.c_cfl},
        {"cadence", c.schedule.cadence}}},
      {"self_interaction", c.self_interaction},
      {"tangents", c.tangents},
      {"deterministic", c.deterministic},
      {"checkpoint_format", c.checkpoint_format},
      {"analysis",
       {{"a_grid_points", c.analysis.a_grid_points},
        {"f_inf_tolerance", c.analysis.f_inf_tolerance},
        {"fit_decades", c.analysis.fit_decades},
        {"interior_fraction", c.analysis.interior_fraction}}},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c = default_config();
  reject_unknown(j,
                 {"schema_version", "m", "lambda", "eps", "delta", "regime_guard", "bump", "normalization", "moments",
                  "grid", "schedule", "self_interaction", "tangents", "deterministic", "checkpoint_format",
                  "analysis"},
                 "config");
  if (!j.contains("schema_version")) throw ConfigError("config has no schema_version");
  get(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  get(j, "m", c.consts.m, "config");
  get(j, "lambda", c.consts.lambda, "config");
  get(j, "eps", c.eps, "config");
  get(j, "delta", c.delta, "config");
  get(j, "regime_guard", c.regime_guard, "config");
  if (j.contains("bump")) {
    const json& b = j.at("bump");
    reject_unknown(b, {"theta", "a", "ell"}, "bump");
    if (b.contains("theta")) c.theta = axis_from(b.at("theta"), c.theta, "bump.theta");
    if (b.contains("a")) c.a = axis_from(b.at("a"), c.a, "bump.a");
    if (b.contains("ell")) c.ell = axis_from(b.at("ell"), c.ell, "bump.ell");
  }
  if (j.contains("normalization")) c.normalization = moment_from(j.at("normalization"), "normalization");
  if (j.contains("moments")) {
    if (!j.at("moments").is_array()) throw ConfigError("moments must be an array");
    c.moments.clear();
    for (const json& m : j.at("moments")) c.moments.push_back(moment_from(m, "moments[]"));
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"n_theta", "n_a", "n_ell"}, "grid");
    get(g, "n_theta", c.grid.n_theta, "grid");
    get(g, "n_a", c.grid.n_a, "grid");
    get(g, "n_ell", c.grid.n_ell, "grid");
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, {"t_end", "dt_max", "c_cfl", "cadence"}, "schedule");
    get(s, "t_end", c.schedule.t_end, "schedule");
    get(s, "dt_max", c.schedule.dt_max, "schedule");
    get(s, "c_cfl", c.schedule.c_cfl, "schedule");
    get(s, "cadence", c.schedule.cadence, "schedule");
  }
  get(j, "self_interaction", c.self_interaction, "config");
  get(j, "tangents", c.tangents, "config");
  get(j, "deterministic", c.deterministic, "config");
  get(j, "checkpoint_format", c.checkpoint_format, "config");
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    reject_unknown(a, {"a_grid_points", "f_inf_tolerance", "fit_decades", "interior_fraction"}, "analysis");
    get(a, "a_grid_points", c.analysis.a_grid_points, "analysis");
    get(a, "f_inf_tolerance", c.analysis.f_inf_tolerance, "analysis");
    get(a, "fit_decades", c.analysis.fit_decades, "analysis");
    get(a, "interior_fraction", c.analysis.interior_fraction, "analysis");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& c, bool override_guard) {
  try {
    validate(c.consts);
    validate(c.schedule);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!finite_pos(c.eps)) throw ConfigError("eps must be positive");
  if (!finite_pos(c.delta)) throw ConfigError("delta must be positive");
  if (!finite_pos(c.regime_guard)) throw ConfigError("regime_guard must be positive");
  for (const BumpAxis* ax : {&c.theta, &c.a, &c.ell})
    if (!std::isfinite(ax->center) || !finite_pos(ax->half_width)) throw ConfigError("bump axes need finite centers and positive widths");
  if (c.grid.n_theta < 1 || c.grid.n_a < 1 || c.grid.n_ell < 1) throw ConfigError("grid sizes must be >= 1");
  if (!(c.a.lo() > 0.0)) throw ConfigError("bump support must have a > 0");
  if (!(c.ell.lo() > 0.0)) throw ConfigError("bump support must have ell > 0");
  // a<ell>^(1/2) is increasing in a and in ell > 0, so the corner decides
  const double corner = c.a.lo() * std::sqrt(japanese(c.ell.lo()));
  if (!(corner > c.delta))
    throw ConfigError("bump support leaves D(delta): min a<ell>^(1/2) = " + std::to_string(corner));
  if (!override_guard && !(c.eps <= c.regime_guard * c.delta * c.delta))
    throw ConfigError("eps = " + std::to_string(c.eps) + " exceeds regime_guard*delta^2 = " +
                      std::to_string(c.regime_guard * c.delta * c.delta) + " (use --override-regime-guard)");
  if (c.checkpoint_format != "binary" && c.checkpoint_format != "csv")
    throw ConfigError("checkpoint_format must be 'binary' or 'csv'");
  if (!c.deterministic) throw ConfigError("deterministic = false is not supported; every kernel is ordered");
  if (c.analysis.a_grid_points < 2) throw ConfigError("analysis.a_grid_points must be >= 2");
  if (!finite_pos(c.analysis.f_inf_tolerance) || !finite_pos(c.analysis.fit_decades))
    throw ConfigError("analysis tolerances must be positive");
  if (!(c.analysis.interior_fraction >= 0.0 && c.analysis.interior_fraction < 0.5))
    throw ConfigError("analysis.interior_fraction must be in [0, 0.5)");
}

InitialData synthesize_initial(const RunConfig& c) {
  validate(c, true);
  InitialData out;
  Ensemble& ens = out.ensemble;
  ens.consts = c.consts;
  ens.eps = c.eps;
  ens.delta = c.delta;
  ens.t = 0.0;

  const double ht = 2.0 * c.theta.half_width / c.grid.n_theta;
  const double ha = 2.0 * c.a.half_width / c.grid.n_a;
  const double hl = 2.0 * c.ell.half_width / c.grid.n_ell;
  const double w = ht * ha * hl;
  for (int ia = 0; ia < c.grid.n_a; ++ia) {
    const double a = c.a.lo() + (ia + 0.5) * ha;
    const double ba = bump(a, c.a);
    for (int il = 0; il < c.grid.n_ell; ++il) {
      const double ell = c.ell.lo() + (il + 0.5) * hl;
      const double bl = bump(ell, c.ell);
      const auto group = static_cast<std::uint32_t>(ia * c.grid.n_ell + il);
      const double p = derive_params(a, ell, c.consts).p;
      for (int it = 0; it < c.grid.n_theta; ++it) {
        double theta = c.theta.lo() + (it + 0.5) * ht;
        const double g = bump(theta, c.theta) * ba * bl;
        if (g == 0.0) continue;
        if (theta == 0.0) theta = 1e-12 * p;
        ens.markers.push_back({theta, a, ell, w, g, group});
      }
    }
  }
  if (ens.markers.empty()) throw ConfigError("initial grid produced no markers");

  const double raw = moment_norm(ens, c.normalization);
  if (!(raw > 0.0)) throw ConfigError("normalization moment of the raw bump is zero");
  out.scale = c.eps / raw;
  for (Marker& mk : ens.markers) mk.g *= out.scale;
  out.achieved_moments.push_back(moment_norm(ens, c.normalization));
  for (const MomentSpec& m : c.moments) out.achieved_moments.push_back(moment_norm(ens, m));
  return out;
}

}  // namespace radvp
