#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "radvp/checkpoint.hpp"
#include "radvp/cli.hpp"
#include "radvp/config.hpp"
#include "radvp/errors.hpp"
#include "radvp/report_io.hpp"

using namespace radvp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("radvp_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

RunConfig small_config() {
  RunConfig cfg = default_config();
  cfg.grid = {9, 7, 3};
  cfg.schedule.t_end = 20.0;
  return cfg;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream(path) << j.dump(2);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "radvp");
  return cli_main(args);
}

}  // namespace

TEST_CASE("config JSON round trip and validation") {
  const RunConfig d = default_config();
  const RunConfig back = config_from_json(to_json(d));
  CHECK(to_json(back) == to_json(d));
  CHECK_NOTHROW(validate(d));
  CHECK(d.eps <= d.regime_guard * d.delta * d.delta);

  nlohmann::json j = to_json(d);
  SUBCASE("unknown key") {
    j["epsilon"] = 0.1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  }
  SUBCASE("schema version") {
    j.erase("schema_version");
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j["schema_version"] = 99;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  }
  SUBCASE("wrong type") {
    j["grid"]["n_a"] = "many";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  }
  SUBCASE("partial config keeps defaults") {
    const RunConfig c = config_from_json({{"schema_version", 1}, {"eps", 0.05}});
    CHECK(c.eps == 0.05);
    CHECK(c.grid.n_theta == 33);
  }
}

TEST_CASE("regime guard and support checks") {
  RunConfig c = default_config();
  c.eps = c.delta;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_NOTHROW(validate(c, true));
  c = default_config();
  c.delta = 1.3;  // corner of the bump box has a<ell>^(1/2) = 1.2247
  c.eps = 0.01;
  CHECK_THROWS_AS(validate(c, true), ConfigError);
  c = default_config();
  c.ell = {0.5, 0.75};  // reaches ell <= 0
  CHECK_THROWS_AS(validate(c, true), ConfigError);
  c = default_config();
  c.schedule.dt_max = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.checkpoint_format = "hdf5";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.deterministic = false;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("initial data synthesis") {
  SUBCASE("1x1x1 grid puts a single marker at the bump center") {
    RunConfig c = default_config();
    c.grid = {1, 1, 1};
    const Ensemble e = synthesize_initial(c).ensemble;
    REQUIRE(e.markers.size() == 1);
    const Marker& mk = e.markers[0];
    const double p = derive_params(mk.a, mk.ell, c.consts).p;
    CHECK(mk.theta == 1e-12 * p);  // theta = 0 is moved off the symmetry point
    CHECK(mk.a == 1.5);
    CHECK(mk.ell == 1.25);
    CHECK(mk.g == doctest::Approx(c.eps).epsilon(1e-15));
  }
  SUBCASE("normalization hits eps") {
    const RunConfig c = default_config();
    const InitialData init = synthesize_initial(c);
    CHECK(std::fabs(init.achieved_moments[0] - c.eps) <= 1e-12 * c.eps);
    CHECK(init.ensemble.markers.size() == 33u * 33u * 9u);
    CHECK(support_margin(init.ensemble) >= 0.5 * c.delta);
    std::set<std::uint32_t> groups;
    for (const Marker& mk : init.ensemble.markers) groups.insert(mk.group);
    CHECK(groups.size() == 33u * 9u);
  }
  SUBCASE("doubling n_theta halves w and doubles the count") {
    RunConfig c = default_config();
    c.grid = {8, 5, 3};
    const Ensemble a = synthesize_initial(c).ensemble;
    c.grid.n_theta = 16;
    const Ensemble b = synthesize_initial(c).ensemble;
    CHECK(b.markers.size() == 2 * a.markers.size());
    CHECK(b.markers[0].w == doctest::Approx(0.5 * a.markers[0].w).epsilon(1e-15));
  }
  SUBCASE("raw bump mass converges at least at second order") {
    RunConfig c = default_config();
    auto raw_mass = [&](int n) {
      c.grid = {n, 5, 3};
      const InitialData d = synthesize_initial(c);
      return total_mass(d.ensemble) / (d.scale * d.scale);
    };
    const double ref = raw_mass(1024);
    const double e1 = std::fabs(raw_mass(8) - ref), e2 = std::fabs(raw_mass(16) - ref), e3 = std::fabs(raw_mass(32) - ref);
    MESSAGE("errors " << e1 << " " << e2 << " " << e3);
    CHECK(e1 / e2 >= 4.0);
    CHECK(e2 / e3 >= 4.0);
  }
}

TEST_CASE("checkpoints reload bit-exactly") {
  TempDir dir("ckpt");
  RunConfig cfg = small_config();
  Ensemble e = synthesize_initial(cfg).ensemble;
  e.t = 0.1 + 0.2;
  TangentState tan = TangentState::identity(e.markers.size());
  tan.d_theta_da[3] = std::nextafter(0.0, 1.0);
  tan.d_a_da[4] = -1.0 / 3.0;
  for (CheckpointFormat f : {CheckpointFormat::binary, CheckpointFormat::csv}) {
    for (bool with_tan : {false, true}) {
      const std::string p = dir / checkpoint_file_name(with_tan, f);
      write_checkpoint(p, e, with_tan ? &tan : nullptr, f);
      const Checkpoint c = read_checkpoint(p);
      CHECK(c.schema_version == kSchemaVersion);
      CHECK(c.ensemble.t == e.t);
      CHECK(c.ensemble.eps == e.eps);
      CHECK(c.ensemble.delta == e.delta);
      CHECK(c.ensemble.consts.m == e.consts.m);
      CHECK(c.ensemble.consts.lambda == e.consts.lambda);
      REQUIRE(c.ensemble.markers.size() == e.markers.size());
      bool same = true;
      for (std::size_t i = 0; i < e.markers.size(); ++i) {
        const Marker &x = e.markers[i], &y = c.ensemble.markers[i];
        same = same && x.theta == y.theta && x.a == y.a && x.ell == y.ell && x.w == y.w && x.g == y.g &&
               x.group == y.group;
      }
      CHECK(same);
      CHECK(c.tangents.has_value() == with_tan);
      if (with_tan) {
        CHECK(c.tangents->d_theta_da == tan.d_theta_da);
        CHECK(c.tangents->d_a_da == tan.d_a_da);
      }
    }
  }
  SUBCASE("malformed files") {
    const std::string good = dir / checkpoint_file_name(0, CheckpointFormat::binary);
    const std::string body = slurp(good);
    const std::string cut = dir / "cut.bin";
    std::ofstream(cut, std::ios::binary) << body.substr(0, body.size() - 5);
    CHECK_THROWS_AS(read_checkpoint(cut), ConfigError);
    const std::string junk = dir / "junk.bin";
    std::ofstream(junk) << "hello\n";
    CHECK_THROWS_AS(read_checkpoint(junk), ConfigError);
    CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), ConfigError);
  }
}

TEST_CASE("report export") {
  RunConfig cfg = small_config();
  const RunArtifacts art = execute_run(cfg, {});
  const nlohmann::json s = report_summary(art.report, cfg);
  CHECK(s.at("version").is_string());
  CHECK(s.at("config") == to_json(cfg));
  CHECK(s.at("pass").size() == 11);
  CHECK(s.at("pass").at("support").get<bool>());
  std::ostringstream ts;
  write_timeseries_csv(ts, art.report);
  std::istringstream in(ts.str());
  std::string header, line;
  std::getline(in, header);
  const auto columns = std::count(header.begin(), header.end(), ',') + 1;
  CHECK(columns == 11 + 2 + static_cast<long>(cfg.moments.size()));
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
  }
  CHECK(rows == 11);
}

TEST_CASE("cli exit codes") {
  TempDir dir("exit");
  CHECK(cli({"verify"}) == kExitOk);
  CHECK(cli({}) == kExitConfig);
  CHECK(cli({"frobnicate"}) == kExitConfig);

  RunConfig bad = small_config();
  bad.eps = bad.delta;
  write_json(dir / "bad.json", to_json(bad));
  CHECK(cli({"run", dir / "bad.json", "--out", dir / "bad_run"}) == kExitConfig);
  CHECK_FALSE(fs::exists(dir / "bad_run/checkpoints/ckpt_000000.bin"));  // rejected before stepping

  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(cli({"run", dir / "broken.json", "--out", dir / "x"}) == kExitConfig);
  CHECK(cli({"run", dir / "nowhere.json", "--out", dir / "x"}) == kExitConfig);
  CHECK(cli({"run", "--out", dir / "x"}) == kExitConfig);

  RunConfig violent = small_config();
  violent.eps = 3.0;
  violent.delta = 1.2;
  write_json(dir / "violent.json", to_json(violent));
  CHECK(cli({"run", dir / "violent.json", "--out", dir / "v", "--override-regime-guard"}) == kExitRegime);

  CHECK(cli({"field-snapshot", dir / "missing.bin", "1:2:3"}) == kExitConfig);
  CHECK(cli({"scatter-report", dir / "nothing-here"}) == kExitConfig);
}

TEST_CASE("run, scatter-report, field-snapshot, determinism and resume") {
  TempDir dir("run");
  const RunConfig cfg = small_config();
  write_json(dir / "cfg.json", to_json(cfg));
  REQUIRE(cli({"run", dir / "cfg.json", "--out", dir / "a", "--threads", "1"}) == kExitOk);
  REQUIRE(cli({"run", "--config", dir / "cfg.json", "--out", dir / "b", "--threads", "4"}) == kExitOk);
  for (const char* f : {"report/summary.json", "report/timeseries.csv", "report/f_inf.csv",
                        "checkpoints/ckpt_000010.bin", "config.json"})
    CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  CHECK_FALSE(slurp(dir / "a/report/summary.json").empty());

  SUBCASE("scatter-report rebuilds the same report from checkpoints") {
    REQUIRE(cli({"scatter-report", dir / "a", "--out", dir / "a/rebuilt"}) == kExitOk);
    for (const char* f : {"summary.json", "timeseries.csv", "f_inf.csv"})
      CHECK(slurp(dir / (std::string("a/report/") + f)) == slurp(dir / (std::string("a/rebuilt/") + f)));
  }
  SUBCASE("resume from a checkpoint equals the uninterrupted run") {
    RunConfig first = cfg;
    first.schedule.t_end = 8.0;
    write_json(dir / "first.json", to_json(first));
    REQUIRE(cli({"run", dir / "first.json", "--out", dir / "c"}) == kExitOk);
    REQUIRE(cli({"run", dir / "cfg.json", "--out", dir / "c", "--resume"}) == kExitOk);
    for (const char* f : {"report/summary.json", "report/timeseries.csv", "checkpoints/ckpt_000010.bin"})
      CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("c/") + f)));
  }
  SUBCASE("csv checkpoints give the same report") {
    RunConfig csv = cfg;
    csv.checkpoint_format = "csv";
    write_json(dir / "csv.json", to_json(csv));
    REQUIRE(cli({"run", dir / "csv.json", "--out", dir / "d"}) == kExitOk);
    CHECK(slurp(dir / "a/report/timeseries.csv") == slurp(dir / "d/report/timeseries.csv"));
    REQUIRE(cli({"scatter-report", dir / "d", "--out", dir / "d/rebuilt"}) == kExitOk);
    CHECK(slurp(dir / "d/report/timeseries.csv") == slurp(dir / "d/rebuilt/timeseries.csv"));
  }
  SUBCASE("field snapshot") {
    REQUIRE(cli({"field-snapshot", dir / "a/checkpoints/ckpt_000005.bin", "1:60:5", "--out", dir / "f.csv"}) == kExitOk);
    std::istringstream in(slurp(dir / "f.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,F,psi,F_eff");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
    std::ofstream(dir / "radii.txt") << "r\n2.5\n7\n";
    CHECK(cli({"field-snapshot", dir / "a/checkpoints/ckpt_000005.bin", dir / "radii.txt", "--out", dir / "g.csv"}) ==
          kExitOk);
    CHECK(cli({"field-snapshot", dir / "a/checkpoints/ckpt_000005.bin", "0:1:3"}) == kExitConfig);
  }
}
