#include "doctest.h"

#include "mhdlab/runner.hpp"
#include "mhdlab/snapshot.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace mhd::cli;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mhdlab_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunOptions opts_in(const fs::path& root) {
  RunOptions o;
  o.output_root = root;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

RunConfig quick(const std::string& scenario) {
  RunConfig c;
  c.set("scenario", scenario);
  c.set("grid.n", "32");
  c.set("solver.t_end", "0.05");
  c.set("solver.dt", "0.01");
  return c;
}

bool all_pass(const json& checks) {
  for (const auto& c : checks) {
    if (!c["pass"].get<bool>()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment line\n"
      "scenario = equal   # trailing comment\n"
      "\n"
      "grid.n=64\n"
      "grid.L = 4pi\n"
      "shape.kind = ellipse\n");
  const RunConfig c = RunConfig::parse(in, "test");
  CHECK(c.str("scenario") == "equal");
  CHECK(c.integer("grid.n") == 64);
  CHECK(c.num("grid.L") == doctest::Approx(4 * 3.141592653589793));
  CHECK(c.str("shape.kind") == "ellipse");
  CHECK_FALSE(c.has("seed"));
  CHECK(c.integer("seed") == 1);
  CHECK(c.str("solver.scheme") == "primitive");

  std::istringstream unknown("grid.m = 64\n");
  CHECK_THROWS_AS(RunConfig::parse(unknown, "test"), ConfigError);
  std::istringstream noeq("grid.n 64\n");
  CHECK_THROWS_AS(RunConfig::parse(noeq, "test"), ConfigError);
  try {
    std::istringstream bad("\n\ngrid.n = sixty\n");
    RunConfig::parse(bad, "cfg");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg:3") != std::string::npos);
  }
  RunConfig o;
  CHECK_THROWS_AS(o.set("scenario", "bogus"), ConfigError);
  CHECK_THROWS_AS(o.set("solver.strict_cfl", "perhaps"), ConfigError);
  CHECK_THROWS_AS(o.set("no-equals-sign"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_file("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("overrides and frozen config") {
  RunConfig c;
  c.set("grid.n=256");
  c.set("grid.n", "128");
  CHECK(c.integer("grid.n") == 128);
  c.set("bench.sizes", "32,64");
  CHECK(c.int_list("bench.sizes") == std::vector<int>{32, 64});
  const std::string f = c.frozen();
  CHECK(f.find("grid.n = 128\n") != std::string::npos);
  CHECK(f.find("scenario = patch\n") != std::string::npos);
  // Every known key appears exactly once.
  CHECK(static_cast<size_t>(std::count(f.begin(), f.end(), '\n')) == RunConfig::defaults().size());
  // The frozen form parses back to the same configuration.
  std::istringstream in(f);
  CHECK(RunConfig::parse(in).frozen() == f);
}

TEST_CASE("output root resolution") {
  RunConfig c;
  c.set("output.root", "from-config");
  RunOptions o;
  ::unsetenv("MHDLAB_OUTPUT_ROOT");
  CHECK(output_root(c, o) == fs::path("from-config"));
  ::setenv("MHDLAB_OUTPUT_ROOT", "/tmp/from-env", 1);
  CHECK(output_root(c, o) == fs::path("/tmp/from-env"));
  o.output_root = "/tmp/from-options";
  CHECK(output_root(c, o) == fs::path("/tmp/from-options"));
  ::unsetenv("MHDLAB_OUTPUT_ROOT");
}

TEST_CASE("zero scenario run directory") {
  const fs::path root = scratch("zero");
  const RunResult r = simulate(quick("zero"), opts_in(root));
  REQUIRE(r.exit_code == ExitCode::ok);
  CHECK(r.run_dir == root / "simulate-zero");
  for (const char* f : {"config.txt", "VERSION", "diagnostics.csv", "report.json", "snapshot_000000.mhdp",
                        "snapshot_000005.mhdp"}) {
    CHECK(fs::exists(r.run_dir / f));
  }
  CHECK(slurp(r.run_dir / "VERSION") == std::string(kVersion) + "\n");
  const json rep = read_json(r.run_dir / "report.json");
  CHECK(rep["exit_code"] == 0);
  CHECK(rep["steps"] == 5);
  CHECK(rep["untracked_columns"].size() == 4);
  const mhd::Snapshot snap = mhd::read_snapshot(r.run_dir / "snapshot_000005.mhdp");
  CHECK(snap.at("omega").sup() == 0.0);
}

TEST_CASE("equal-domain run stays put") {
  const fs::path root = scratch("equal");
  RunConfig c = quick("equal");
  c.set("grid.n", "64");
  c.set("shape.kind", "ellipse");
  c.set("output.markers", "64");
  const RunResult r = simulate(c, opts_in(root));
  REQUIRE(r.exit_code == ExitCode::ok);
  const json rep = read_json(r.run_dir / "report.json");
  CHECK(all_pass(rep["checks"]));
  CHECK(fs::exists(r.run_dir / "contour_000005.csv"));
  CHECK(slurp(r.run_dir / "contour_000000.csv").rfind("theta,x,y\n", 0) == 0);
}

TEST_CASE("runs are byte-for-byte reproducible") {
  const fs::path a = scratch("repro-a"), b = scratch("repro-b");
  RunConfig c = quick("random");
  c.set("seed", "4");
  REQUIRE(simulate(c, opts_in(a)).exit_code == ExitCode::ok);
  REQUIRE(simulate(c, opts_in(b)).exit_code == ExitCode::ok);
  for (const char* f : {"diagnostics.csv", "report.json", "config.txt", "snapshot_000005.mhdp"}) {
    CHECK(slurp(a / "simulate-random" / f) == slurp(b / "simulate-random" / f));
  }
  // And the report subcommand recognises the golden file.
  const RunResult rep = report(a / "simulate-random", b / "simulate-random", b / "simulate-random" / "diagnostics.csv", {});
  CHECK(rep.exit_code == ExitCode::ok);
  const json j = read_json(a / "simulate-random" / "apriori.json");
  CHECK(all_pass(j["checks"]));
  CHECK(j["apriori"]["c_lp"].get<double>() >= 1.0);

  c.set("seed", "5");
  const fs::path d = scratch("repro-c");
  REQUIRE(simulate(c, opts_in(d)).exit_code == ExitCode::ok);
  CHECK(report(a / "simulate-random", std::nullopt, d / "simulate-random" / "diagnostics.csv", {}).exit_code ==
        ExitCode::failure);
  CHECK(report(scratch("empty"), std::nullopt, std::nullopt, {}).exit_code == ExitCode::failure);
}

TEST_CASE("exit codes") {
  const fs::path root = scratch("codes");
  // A huge fixed step blows up the state.
  RunConfig blow = quick("random");
  blow.set("solver.dt", "10");
  blow.set("solver.t_end", "10000");
  blow.set("init.amplitude", "100");
  blow.set("output.dir", "blow");
  const RunResult nan = simulate(blow, opts_in(root));
  CHECK(nan.exit_code == ExitCode::nan_abort);
  CHECK(read_json(nan.run_dir / "report.json")["abort_step"].get<long>() >= 1);

  // An under-resolved ellipse fails the tangency check.
  RunConfig bad;
  bad.set("grid.n", "64");
  bad.set("shape.kind", "ellipse");
  bad.set("solver.t_end", "0.01");
  bad.set("output.dir", "bad");
  const RunResult na = simulate(bad, opts_in(root));
  CHECK(na.exit_code == ExitCode::not_admissible);
  CHECK(read_json(na.run_dir / "report.json")["admissible"] == false);
  RunOptions allow = opts_in(root);
  allow.allow_nonadmissible = true;
  bad.set("output.dir", "allowed");
  const RunResult forced = simulate(bad, allow);
  CHECK(forced.exit_code == ExitCode::ok);
  CHECK(read_json(forced.run_dir / "report.json")["admissible"] == false);

  RunConfig tiny;
  tiny.set("grid.n", "32");
  CHECK(simulate(tiny, opts_in(root)).exit_code == ExitCode::failure);
  RunConfig badgrid;
  badgrid.set("grid.n", "48");
  CHECK(simulate(badgrid, opts_in(root)).exit_code == ExitCode::failure);
}

TEST_CASE("identities, stationary and bench subcommands") {
  const fs::path root = scratch("subcommands");
  RunConfig c;
  c.set("grid.n", "128");
  const RunResult ids = identities(c, opts_in(root));
  CHECK(ids.exit_code == ExitCode::ok);
  CHECK(fs::exists(ids.run_dir / "identities.csv"));
  CHECK(all_pass(read_json(ids.run_dir / "report.json")["checks"]));

  RunConfig s;
  s.set("stationary.case", "mhd-offset");
  s.set("stationary.samples", "64");
  const RunResult off = stationary(s, opts_in(root));
  CHECK(off.exit_code == ExitCode::ok);
  CHECK(read_json(off.run_dir / "report.json")["verdict"] == "non-stationary");
  CHECK(fs::exists(off.run_dir / "source_map.csv"));
  s.set("stationary.d", "1.0");  // tangent discs
  CHECK(stationary(s, opts_in(root)).exit_code == ExitCode::failure);

  RunConfig b;
  b.set("bench.lemma", "cald1");
  b.set("bench.count", "3");
  b.set("bench.sizes", "32,64");
  const RunResult be = bench_estimates(b, opts_in(root));
  CHECK(be.exit_code == ExitCode::ok);
  const std::string csv = slurp(be.run_dir / "ratios_cald1.csv");
  CHECK(csv.rfind("bound,n,member,block,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK_THROWS_AS(b.set("bench.lemma", "nope"), ConfigError);
}
