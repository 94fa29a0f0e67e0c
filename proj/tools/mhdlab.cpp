#include "mhdlab/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

using mhd::cli::RunConfig;
using mhd::cli::RunOptions;
using mhd::cli::RunResult;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string output_root;
  int jobs = 1;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "key=value config file");
  app->add_option("--set", c.sets, "override one key (key=value), repeatable");
  app->add_option("-o,--output-root", c.output_root, "output root (default: $MHDLAB_OUTPUT_ROOT or output.root)");
  app->add_option("-j,--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  app->add_flag("-q,--quiet", c.quiet, "suppress progress messages");
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig() : RunConfig::parse_file(c.config);
  for (const auto& s : c.sets) cfg.set(s);
  return cfg;
}

RunOptions options_of(const Common& c) {
  RunOptions o;
  o.jobs = c.jobs;
  if (!c.output_root.empty()) o.output_root = c.output_root;
  o.log = c.quiet ? nullptr : &std::cerr;
  return o;
}

int finish(const RunResult& r) {
  if (!r.run_dir.empty()) std::cout << r.run_dir.string() << '\n';
  if (!r.message.empty()) std::cerr << "mhdlab: " << r.message << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral 2D ideal MHD patch laboratory"};
  app.set_version_flag("--version", mhd::cli::kVersion);
  app.require_subcommand(1);

  Common sim_c, id_c, st_c, be_c;
  bool allow_nonadmissible = false;
  auto* sim = app.add_subcommand("simulate", "evolve a scenario and write a run directory");
  add_common(sim, sim_c);
  sim->add_flag("--allow-nonadmissible", allow_nonadmissible, "run patch data that fails the admissibility checks");

  auto* ids = app.add_subcommand("identities", "pointwise identity residuals over a scenario ladder");
  add_common(ids, id_c);

  auto* st = app.add_subcommand("stationary", "free-space stationarity verdict for a patch configuration");
  add_common(st, st_c);
  std::string case_name, st_r, st_R, st_d;
  st->add_option("--case", case_name, "euler-disc, mhd-concentric, mhd-equal or mhd-offset");
  st->add_option("--r", st_r, "vortex patch radius");
  st->add_option("--R", st_R, "current patch radius (concentric case)");
  st->add_option("--d", st_d, "centre separation (offset case)");

  auto* be = app.add_subcommand("bench-estimates", "grid-stability sweep of the commutator estimates");
  add_common(be, be_c);
  std::string lemma, sizes;
  long seed = -1;
  be->add_option("--lemma", lemma, "lb, ce, cald1, cald2, an1 or all");
  be->add_option("--seed", seed, "ensemble seed");
  be->add_option("--sizes", sizes, "comma-separated grid sizes");

  auto* rep = app.add_subcommand("report", "fit a priori constants to a run's diagnostics");
  std::string run_dir, against, golden;
  bool rep_quiet = false;
  rep->add_option("run_dir", run_dir, "run directory")->required();
  rep->add_option("--against", against, "second run to compare constants with");
  rep->add_option("--golden", golden, "golden diagnostics.csv for byte comparison");
  rep->add_flag("-q,--quiet", rep_quiet, "suppress progress messages");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      RunOptions o = options_of(sim_c);
      o.allow_nonadmissible = allow_nonadmissible;
      return finish(mhd::cli::simulate(load(sim_c), o));
    }
    if (*ids) return finish(mhd::cli::identities(load(id_c), options_of(id_c)));
    if (*st) {
      RunConfig cfg = load(st_c);
      if (!case_name.empty()) cfg.set("stationary.case", case_name);
      if (!st_r.empty()) cfg.set("stationary.r", st_r);
      if (!st_R.empty()) cfg.set("stationary.R", st_R);
      if (!st_d.empty()) cfg.set("stationary.d", st_d);
      return finish(mhd::cli::stationary(cfg, options_of(st_c)));
    }
    if (*be) {
      RunConfig cfg = load(be_c);
      if (!lemma.empty()) cfg.set("bench.lemma", lemma);
      if (seed >= 0) cfg.set("seed", std::to_string(seed));
      if (!sizes.empty()) cfg.set("bench.sizes", sizes);
      return finish(mhd::cli::bench_estimates(cfg, options_of(be_c)));
    }
    if (*rep) {
      RunOptions o;
      o.log = rep_quiet ? nullptr : &std::cerr;
      std::optional<std::filesystem::path> a, g;
      if (!against.empty()) a = against;
      if (!golden.empty()) g = golden;
      return finish(mhd::cli::report(run_dir, a, g, o));
    }
  } catch (const std::exception& e) {
    std::cerr << "mhdlab: " << e.what() << '\n';
    return mhd::cli::ExitCode::failure;
  }
  return mhd::cli::ExitCode::failure;
}
