#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "radvp/config.hpp"
#include "radvp/diagnostics.hpp"

namespace radvp {

nlohmann::json report_pass_flags(const ScatteringReport& r);
nlohmann::json report_summary(const ScatteringReport& r, const RunConfig& cfg);

// One row per sample time.
void write_timeseries_csv(std::ostream& os, const ScatteringReport& r);
// a, F_inf, T^2 F_eff(T, aT)
void write_f_inf_csv(std::ostream& os, const ScatteringReport& r);

// dir/summary.json, dir/timeseries.csv, dir/f_inf.csv
void write_report(const std::string& dir, const ScatteringReport& r, const RunConfig& cfg);

}  // namespace radvp
