#include "radvp/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "radvp/errors.hpp"
#include "radvp/format.hpp"
#include "radvp/version.hpp"

namespace radvp {

using nlohmann::json;

namespace {

json fit_json(const Fit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"half_width_95", f.half_width},
          {"points", f.n},    {"below_noise", f.below_noise}, {"degenerate", f.degenerate}};
}

std::string moment_label(const MomentSpec& m) {
  return std::string(m.norm == NormKind::sup ? "sup" : "l2") + "_l" + std::to_string(m.ell) + "_il" +
         std::to_string(m.inv_ell) + "_a" + std::to_string(m.action) + "_th" + std::to_string(m.angle);
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw ConfigError("cannot write " + p.string());
}

}  // namespace

json report_pass_flags(const ScatteringReport& r) {
  return {{"support", r.support_ok},
          {"conservation", r.conservation_ok},
          {"action_convergence", r.action_ok},
          {"angle_growth", r.theta_growth_ok},
          {"xi_decay", r.xi_ok},
          {"xi_vs_zeroed", r.xi_zeroed_ok},
          {"half_coefficient_control", r.half_control_ok},
          {"weak_convergence", r.w1_ok},
          {"f_inf_consistency", r.f_inf_ok},
          {"field_vs_effective", r.field_eff_ok},
          {"tangent_bounds", r.tangent_ok}};
}

json report_summary(const ScatteringReport& r, const RunConfig& cfg) {
  const double T = r.times.empty() ? 0.0 : r.times.back();
  return {
      {"version", kVersion},
      {"config", to_json(cfg)},
      {"t_final", T},
      {"samples", r.times.size()},
      {"max_action_drift", r.max_action_drift},
      {"min_support_margin", r.min_support_margin},
      {"conservation_drift", r.conservation_drift},
      {"f_inf",
       {{"total_mass", r.f_inf.total_mass},
        {"interior", {r.interior_lo, r.interior_hi}},
        {"max_discrepancy", r.f_inf.max_discrepancy},
        {"warn", r.f_inf.warn}}},
      {"fits",
       {{"action_convergence", fit_json(r.action_fit)},
        {"xi_deviation", fit_json(r.xi_fit)},
        {"weak_convergence", fit_json(r.w1_fit)},
        {"f_inf_consistency", fit_json(r.f_inf_fit)},
        {"field_vs_effective", fit_json(r.field_eff_fit)},
        {"angle_growth_vs_log", fit_json(r.theta_growth)}}},
      {"controls",
       {{"xi_zeroed_ratio", r.xi_zeroed_ratio},
        {"half_coefficient_spread", r.half_spread},
        {"half_coefficient_level", r.half_level},
        {"half_coefficient_expected", r.half_expected}}},
      {"pass", report_pass_flags(r)},
  };
}

void write_timeseries_csv(std::ostream& os, const ScatteringReport& r) {
  os << "t,support_margin,a_drift,a_dev,theta_drift,theta_dev,xi_dev,xi_dev_half,w1,f_inf_gap,field_eff_gap";
  const bool tan = !r.tangent_min.empty();
  if (tan) os << ",tangent_min,tangent_max";
  for (const MomentSpec& m : r.moment_specs) os << ',' << moment_label(m);
  os << '\n';
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    auto opt = [&](const std::vector<double>& v) { return k < v.size() ? fmt_double(v[k]) : std::string("nan"); };
    os << fmt_double(r.times[k]) << ',' << fmt_double(r.support_margin[k]) << ',' << fmt_double(r.a_drift[k]) << ','
       << fmt_double(r.a_dev[k]) << ',' << fmt_double(r.theta_drift[k]) << ',' << fmt_double(r.theta_dev[k]) << ','
       << fmt_double(r.xi_dev[k]) << ',' << fmt_double(r.xi_dev_half[k]) << ',' << fmt_double(r.w1[k]) << ','
       << opt(r.f_inf_gap) << ',' << opt(r.field_eff_gap);
    if (tan) os << ',' << fmt_double(r.tangent_min[k]) << ',' << fmt_double(r.tangent_max[k]);
    for (const auto& series : r.moments) os << ',' << fmt_double(series[k]);
    os << '\n';
  }
}

void write_f_inf_csv(std::ostream& os, const ScatteringReport& r) {
  os << "a,f_inf,f_eff_scaled\n";
  for (std::size_t j = 0; j < r.f_inf.a.size(); ++j)
    os << fmt_double(r.f_inf.a[j]) << ',' << fmt_double(r.f_inf.f[j]) << ',' << fmt_double(r.f_inf.f_eff[j]) << '\n';
}

void write_report(const std::string& dir, const ScatteringReport& r, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
  write_file(fs::path(dir) / "summary.json", report_summary(r, cfg).dump(2) + "\n");
  std::ostringstream ts, fi;
  write_timeseries_csv(ts, r);
  write_f_inf_csv(fi, r);
  write_file(fs::path(dir) / "timeseries.csv", ts.str());
  write_file(fs::path(dir) / "f_inf.csv", fi.str());
}

}  // namespace radvp
