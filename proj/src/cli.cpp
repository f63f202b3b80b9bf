#include "radvp/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "radvp/checkpoint.hpp"
#include "radvp/errors.hpp"
#include "radvp/field.hpp"
#include "radvp/format.hpp"
#include "radvp/report_io.hpp"
#include "radvp/verify.hpp"

namespace radvp {

namespace fs = std::filesystem;

namespace {

fs::path checkpoint_dir(const std::string& run_dir) { return fs::path(run_dir) / "checkpoints"; }

// Checkpoint files of a run directory in sample order.
std::vector<fs::path> list_checkpoints(const std::string& run_dir) {
  std::vector<fs::path> files;
  const fs::path dir = checkpoint_dir(run_dir);
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ckpt_", 0) == 0) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void append_snapshot(History& h, std::vector<Ensemble>& states, const Checkpoint& c) {
  h.snapshots.push_back(take_snapshot(c.ensemble, c.tangents ? &*c.tangents : nullptr));
  states.push_back(c.ensemble);
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw ConfigError("cannot write " + p.string());
}

RunConfig read_run_config(const std::string& run_dir) {
  return load_config((fs::path(run_dir) / "config.json").string());
}

}  // namespace

RunArtifacts execute_run(const RunConfig& cfg, const ExecOptions& opts) {
  validate(cfg, opts.override_regime_guard);
  RunArtifacts art;
  art.initial = synthesize_initial(cfg);
  const bool write = !opts.out_dir.empty();
  const CheckpointFormat fmt = parse_checkpoint_format(cfg.checkpoint_format);

  Ensemble start = art.initial.ensemble;
  std::optional<TangentState> start_tan;
  History earlier;  // snapshots before a resume point
  std::vector<Ensemble> states;

  if (write) {
    fs::create_directories(checkpoint_dir(opts.out_dir));
    if (opts.resume) {
      const auto files = list_checkpoints(opts.out_dir);
      if (files.empty()) throw ConfigError("nothing to resume in " + opts.out_dir);
      for (const fs::path& f : files) {
        const Checkpoint c = read_checkpoint(f.string());
        if (c.ensemble.markers.size() != start.markers.size())
          throw ConfigError(f.string() + " does not belong to this config");
        append_snapshot(earlier, states, c);
        start = c.ensemble;
        start_tan = c.tangents;
      }
      if (cfg.tangents != start_tan.has_value()) throw ConfigError("tangent setting differs from the checkpoints");
      earlier.snapshots.pop_back();  // the resume point is sampled again by run()
      states.pop_back();
    } else {
      for (const fs::path& f : list_checkpoints(opts.out_dir)) fs::remove(f);
    }
    write_text(fs::path(opts.out_dir) / "config.json", to_json(cfg).dump(2) + "\n");
  }

  RunOptions ro;
  ro.step.self_interaction = cfg.self_interaction;
  ro.tangents = cfg.tangents;
  std::size_t index = earlier.snapshots.size();
  ro.on_sample = [&](const Ensemble& e, const TangentState* tan) {
    states.push_back(e);
    if (write)
      write_checkpoint((checkpoint_dir(opts.out_dir) / checkpoint_file_name(index, fmt)).string(), e, tan, fmt);
    ++index;
  };
  art.output = run(start, cfg.schedule, ro, start_tan ? &*start_tan : nullptr);

  History& h = art.output.history;
  if (!earlier.snapshots.empty()) {
    h.initial = states.front().markers;
    earlier.snapshots.insert(earlier.snapshots.end(), h.snapshots.begin(), h.snapshots.end());
    h.snapshots = std::move(earlier.snapshots);
  }
  art.report = analyze(h, cfg.analysis, cfg.moments, states);

  if (write) {
    write_report((fs::path(opts.out_dir) / "report").string(), art.report, cfg);
    nlohmann::json moments = nlohmann::json::array();
    for (double m : art.initial.achieved_moments) moments.push_back(m);
    const nlohmann::json info{{"markers", art.initial.ensemble.markers.size()},
                              {"steps_this_invocation", art.output.steps},
                              {"normalization_scale", art.initial.scale},
                              {"achieved_moments", moments},
                              {"resumed", opts.resume}};
    write_text(fs::path(opts.out_dir) / "run_info.json", info.dump(2) + "\n");
  }
  return art;
}

ScatteringReport scatter_report(const std::string& run_dir, const std::string& out_dir) {
  const RunConfig cfg = read_run_config(run_dir);
  const auto files = list_checkpoints(run_dir);
  if (files.empty()) throw ConfigError("no checkpoints in " + run_dir);
  History h;
  std::vector<Ensemble> states;
  for (const fs::path& f : files) {
    const Checkpoint c = read_checkpoint(f.string());
    if (h.snapshots.empty()) {
      h.initial = c.ensemble.markers;
      h.consts = c.ensemble.consts;
      h.eps = c.ensemble.eps;
      h.delta = c.ensemble.delta;
    } else if (c.ensemble.markers.size() != h.initial.size()) {
      throw MismatchedRunError(f.string() + " has a different marker count");
    }
    append_snapshot(h, states, c);
  }
  const ScatteringReport r = analyze(h, cfg.analysis, cfg.moments, states);
  write_report(out_dir.empty() ? (fs::path(run_dir) / "report").string() : out_dir, r, cfg);
  return r;
}

namespace {

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> r;
  if (fs::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::string tok;
    while (in >> tok) {
      if (tok == "r") continue;
      try {
        r.push_back(parse_double(tok));
      } catch (const std::invalid_argument&) {
        throw ConfigError("bad radius '" + tok + "' in " + spec);
      }
    }
  } else {
    // lo:hi:n
    std::stringstream ss(spec);
    std::string lo, hi, n;
    if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, n))
      throw ConfigError("grid must be a file of radii or lo:hi:n");
    try {
      const double a = parse_double(lo), b = parse_double(hi);
      const int k = std::stoi(n);
      if (k < 1 || !(a > 0.0) || !(b >= a)) throw ConfigError("grid needs 0 < lo <= hi and n >= 1");
      for (int i = 0; i < k; ++i) r.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
    } catch (const std::invalid_argument&) {
      throw ConfigError("grid must be a file of radii or lo:hi:n");
    }
  }
  for (double x : r)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("grid radii must be positive");
  if (r.empty()) throw ConfigError("empty radius grid");
  return r;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SupportViolation& e) {
    std::cerr << "regime violation: " << e.what() << '\n';
    return kExitRegime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

void print_summary(const ScatteringReport& r) {
  const nlohmann::json flags = report_pass_flags(r);
  for (const auto& [name, ok] : flags.items())
    std::cout << (ok.get<bool>() ? "pass " : "FAIL ") << name << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args_in) {
  CLI::App app{"Radial Vlasov-Poisson marker simulation around a point mass", "radvp"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (results do not depend on it)")->check(CLI::PositiveNumber);

  std::string config_path, out_dir;
  bool override_guard = false, resume = false;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate and write checkpoints plus the report");
  run_cmd->add_option("config_file", config_path, "config JSON");
  run_cmd->add_option("--config", config_path, "config JSON");
  run_cmd->add_option("--out", out_dir, "run directory")->required();
  run_cmd->add_flag("--override-regime-guard", override_guard, "allow eps above regime_guard * delta^2");
  run_cmd->add_flag("--resume", resume, "continue from the latest checkpoint in --out");

  CLI::App* verify_cmd = app.add_subcommand("verify", "property checks of all modules");

  std::string ckpt, grid, snap_out;
  CLI::App* snap_cmd = app.add_subcommand("field-snapshot", "F, psi and F_eff of a checkpoint on a radius grid");
  snap_cmd->add_option("checkpoint", ckpt)->required();
  snap_cmd->add_option("grid", grid, "file of radii, or lo:hi:n")->required();
  snap_cmd->add_option("--out", snap_out, "CSV path (default: stdout)");

  std::string run_dir, report_out;
  CLI::App* rep_cmd = app.add_subcommand("scatter-report", "recompute the report from checkpoints");
  rep_cmd->add_option("run-dir", run_dir)->required();
  rep_cmd->add_option("--out", report_out, "report directory (default: <run-dir>/report)");

  for (CLI::App* sub : {run_cmd, verify_cmd, snap_cmd, rep_cmd}) sub->fallthrough();

  std::vector<std::string> args(args_in.begin() + (args_in.empty() ? 0 : 1), args_in.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (*run_cmd) {
    return guarded([&] {
      if (config_path.empty()) throw ConfigError("run needs a config (positional or --config)");
      const RunConfig cfg = load_config(config_path);
      const RunArtifacts art = execute_run(cfg, {out_dir, override_guard, resume});
      print_summary(art.report);
      return kExitOk;
    });
  }
  if (*verify_cmd) {
    return guarded([&] { return run_verify(std::cout) == 0 ? kExitOk : kExitFailure; });
  }
  if (*snap_cmd) {
    return guarded([&] {
      const Checkpoint c = read_checkpoint(ckpt);
      const std::vector<double> r = parse_grid(grid);
      if (snap_out.empty()) {
        write_field_snapshot(std::cout, c.ensemble, r);
      } else {
        std::ofstream out(snap_out);
        if (!out) throw ConfigError("cannot write " + snap_out);
        write_field_snapshot(out, c.ensemble, r);
      }
      return kExitOk;
    });
  }
  return guarded([&] {
    print_summary(scatter_report(run_dir, report_out));
    return kExitOk;
  });
}

int cli_main(int argc, char** argv) { return cli_main(std::vector<std::string>(argv, argv + argc)); }

}  // namespace radvp
