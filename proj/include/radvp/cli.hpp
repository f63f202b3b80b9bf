#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radvp/config.hpp"
#include "radvp/diagnostics.hpp"
#include "radvp/dynamics.hpp"

namespace radvp {

enum ExitCode : int {
  kExitOk = 0,
  kExitRegime = 1,   // support violation during the run
  kExitConfig = 2,   // bad config, arguments or input files
  kExitFailure = 3,  // verify failures and unexpected errors
};

struct ExecOptions {
  std::string out_dir;  // empty: nothing is written
  bool override_regime_guard = false;
  bool resume = false;  // continue from the latest checkpoint in out_dir
};

struct RunArtifacts {
  InitialData initial;
  RunOutput output;
  ScatteringReport report;
};

// Synthesis, time stepping, checkpoints at every output time and the report.
RunArtifacts execute_run(const RunConfig& cfg, const ExecOptions& opts);

// Rebuilds the report of a run directory from its checkpoints and writes it to
// out_dir (default: <run_dir>/report).
ScatteringReport scatter_report(const std::string& run_dir, const std::string& out_dir = {});

int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace radvp
