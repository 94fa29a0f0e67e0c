#include "mhdlab/runner.hpp"

#include "mhdlab/bench.hpp"
#include "mhdlab/diagnostics.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/patch.hpp"
#include "mhdlab/snapshot.hpp"
#include "mhdlab/stationary.hpp"
#include "mhdlab/util.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace mhd::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::string kTwoPi = "6.283185307179586";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& v) {
  if (v == "2pi") return 2.0 * std::numbers::pi;
  if (v == "4pi") return 4.0 * std::numbers::pi;
  size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' expects true/false, got '" + v + "'");
}

enum class Kind { number, integer, flag, text, int_list, choice };

struct KeySpec {
  std::string def;
  Kind kind;
  std::vector<std::string> choices = {};
};

const std::map<std::string, KeySpec>& schema() {
  static const std::map<std::string, KeySpec> s = {
      {"scenario", {"patch", Kind::choice, {"patch", "equal", "euler", "concentric", "random", "zero"}}},
      {"seed", {"1", Kind::integer}},
      {"grid.n", {"128", Kind::integer}},
      {"grid.L", {kTwoPi, Kind::number}},
      {"solver.dt", {"0", Kind::number}},
      {"solver.cfl", {"0.5", Kind::number}},
      {"solver.t_end", {"1", Kind::number}},
      {"solver.scheme", {"primitive", Kind::choice, {"primitive", "elsasser"}}},
      {"solver.filter", {"0", Kind::number}},
      {"solver.strict_cfl", {"false", Kind::flag}},
      {"shape.kind", {"disc", Kind::choice, {"disc", "ellipse", "star"}}},
      {"shape.r", {"0.75", Kind::number}},
      {"shape.a", {"1", Kind::number}},
      {"shape.b", {"0.5", Kind::number}},
      {"shape.r0", {"0.75", Kind::number}},
      {"shape.modes", {"", Kind::text}},
      {"shape.offset_x", {"0", Kind::number}},
      {"shape.offset_y", {"0", Kind::number}},
      {"init.h_cells", {"4", Kind::number}},
      {"init.amplitude", {"1", Kind::number}},
      {"init.R", {"0.8", Kind::number}},
      {"init.exponent", {"2", Kind::number}},
      {"output.root", {"runs", Kind::text}},
      {"output.dir", {"", Kind::text}},
      {"output.p", {"4", Kind::number}},
      {"output.diag_every", {"1", Kind::integer}},
      {"output.every", {"0", Kind::integer}},
      {"output.markers", {"256", Kind::integer}},
      {"output.holder", {"0.5", Kind::number}},
      {"stationary.case", {"mhd-concentric", Kind::choice, {"euler-disc", "mhd-concentric", "mhd-equal", "mhd-offset"}}},
      {"stationary.r", {"0.5", Kind::number}},
      {"stationary.R", {"0.8", Kind::number}},
      {"stationary.d", {"0.4", Kind::number}},
      {"stationary.accuracy", {"1e-5", Kind::number}},
      {"stationary.samples", {"256", Kind::integer}},
      {"bench.lemma", {"all", Kind::choice, {"all", "lb", "ce", "cald1", "cald2", "an1"}}},
      {"bench.count", {"50", Kind::integer}},
      {"bench.sizes", {"64,128,256", Kind::int_list}},
      {"bench.exponent", {"2", Kind::number}},
  };
  return s;
}

const KeySpec& spec_of(const std::string& key) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

void check_value(const std::string& key, const std::string& v) {
  const KeySpec& k = spec_of(key);
  switch (k.kind) {
    case Kind::number:
      parse_number(key, v);
      break;
    case Kind::integer: {
      const double x = parse_number(key, v);
      if (x != std::floor(x)) throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
      break;
    }
    case Kind::flag:
      parse_flag(key, v);
      break;
    case Kind::int_list:
      for (const auto& item : split(v, ',')) check_value("seed", item);
      break;
    case Kind::choice:
      if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
        std::string all;
        for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
        throw ConfigError("key '" + key + "' must be one of {" + all + "}, got '" + v + "'");
      }
      break;
    case Kind::text:
      break;
  }
}

// ---------------------------------------------------------------- outputs

void log_line(const RunOptions& opts, const std::string& s) {
  if (opts.log) *opts.log << s << '\n';
}

fs::path prepare_dir(const RunConfig& cfg, const RunOptions& opts, const std::string& fallback) {
  const std::string name = cfg.str("output.dir").empty() ? fallback : cfg.str("output.dir");
  const fs::path dir = output_root(cfg, opts) / name;
  fs::create_directories(dir);
  std::ofstream(dir / "config.txt") << cfg.frozen();
  std::ofstream(dir / "VERSION") << kVersion << '\n';
  return dir;
}

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2) << '\n'; }

json check(const std::string& label, double value, double limit, bool upper = true) {
  json c;
  c["check"] = label;
  c["value"] = value;
  c["limit"] = limit;
  c["pass"] = upper ? value <= limit : value >= limit;
  return c;
}

// ---------------------------------------------------------------- scenarios

Grid grid_of(const RunConfig& cfg) { return Grid(static_cast<int>(cfg.integer("grid.n")), cfg.num("grid.L")); }

ShapeSpec shape_of(const RunConfig& cfg, const Point& center) {
  const std::string kind = cfg.str("shape.kind");
  ShapeSpec s;
  if (kind == "disc") {
    s = ShapeSpec::disc(center, cfg.num("shape.r"));
  } else if (kind == "ellipse") {
    s = ShapeSpec::ellipse(center, cfg.num("shape.a"), cfg.num("shape.b"));
  } else {
    std::vector<std::pair<int, double>> modes;
    for (const auto& m : split(cfg.str("shape.modes"), ',')) {
      const auto parts = split(m, ':');
      if (parts.size() != 2) throw ConfigError("shape.modes entries look like k:eps, got '" + m + "'");
      modes.emplace_back(static_cast<int>(parse_number("shape.modes", parts[0])),
                         parse_number("shape.modes", parts[1]));
    }
    s = ShapeSpec::star(center, cfg.num("shape.r0"), std::move(modes));
  }
  return s;
}

ShapeSpec shape_in_box(const RunConfig& cfg, const Grid& g) {
  const Point c = g.center() + Point(cfg.num("shape.offset_x"), cfg.num("shape.offset_y"));
  ShapeSpec s = shape_of(cfg, c);
  s.validate_in(g);
  return s;
}

struct Scenario {
  MHDState state;
  std::optional<ShapeSpec> shape;
  std::optional<PatchData> patch;
};

Scenario build_scenario(const RunConfig& cfg, const RunOptions& opts, const Grid& g) {
  const std::string name = cfg.str("scenario");
  const double h = cfg.num("init.h_cells") * g.spacing();
  const double amp = cfg.num("init.amplitude");
  auto scaled = [amp](MHDState s) { return MHDState(amp * s.omega, amp * s.j, 0.0); };
  if (name == "zero") return {MHDState::zero(g), std::nullopt, std::nullopt};
  if (name == "random") {
    Ensemble ens;
    ens.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    ens.exponent = cfg.num("init.exponent");
    const Grid unit(g.n(), 2.0 * std::numbers::pi);
    if (!(unit == g)) throw ConfigError("scenario 'random' needs grid.L = 2pi");
    return {scaled(MHDState(mean_projected(ens.member(g, 0, 0)), mean_projected(ens.member(g, 0, 1)))),
            std::nullopt, std::nullopt};
  }
  const ShapeSpec shape = shape_in_box(cfg, g);
  if (name == "patch") {
    PatchData p = make_patch(shape, h, g, !opts.allow_nonadmissible);
    if (!p.admissible) log_line(opts, "warning: proceeding with non-admissible data: " + p.reason);
    return {scaled(p.state()), shape, std::move(p)};
  }
  if (name == "concentric") {
    if (shape.kind != ShapeKind::disc) throw ConfigError("scenario 'concentric' needs shape.kind = disc");
    return {scaled(concentric_state(shape.r, cfg.num("init.R"), g, h, shape.center)), shape, std::nullopt};
  }
  const ScalarField w = mean_projected(indicator(shape, h, g));
  if (name == "equal") return {scaled(MHDState(w, w)), shape, std::nullopt};
  return {scaled(MHDState(w, ScalarField(g))), shape, std::nullopt};  // euler
}

SolverConfig solver_of(const RunConfig& cfg) {
  SolverConfig s;
  s.dt = cfg.num("solver.dt");
  s.cfl = cfg.num("solver.cfl");
  s.t_end = cfg.num("solver.t_end");
  s.scheme = cfg.str("solver.scheme") == "elsasser" ? Scheme::elsasser : Scheme::primitive;
  s.filter = cfg.num("solver.filter");
  s.strict_cfl = cfg.flag("solver.strict_cfl");
  s.validate();
  return s;
}

void write_contour(const fs::path& path, const std::vector<Point>& pts) {
  std::ofstream os(path);
  os << "theta,x,y\n";
  const double n = static_cast<double>(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    os << format_double(2.0 * std::numbers::pi * static_cast<double>(i) / n) << ',' << format_double(pts[i].x())
       << ',' << format_double(pts[i].y()) << '\n';
  }
}

std::string step_tag(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06ld", step);
  return buf;
}

std::vector<DiagnosticsRecord> read_diagnostics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != csv_header()) throw std::runtime_error(path.string() + ": unexpected diagnostics header");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> v;
    for (const auto& item : split(line, ',')) v.push_back(std::stod(item));
    if (v.size() != 23) throw std::runtime_error(path.string() + ": malformed diagnostics row");
    DiagnosticsRecord r;
    double* fields[] = {&r.t,          &r.p,          &r.omega_l1,   &r.omega_l2,
                        &r.omega_lp,   &r.omega_linf, &r.j_l1,       &r.j_l2,
                        &r.j_lp,       &r.j_linf,     &r.energy,     &r.grad_v_sup,
                        &r.grad_b_sup, &r.grad_sup,   &r.residual_l2_omega, &r.residual_l2_j,
                        &r.residual_relative, &r.tangency, &r.frozen_in, &r.conormal_omega,
                        &r.conormal_j, &r.holder_omega, &r.holder_j};
    for (size_t i = 0; i < v.size(); ++i) *fields[i] = v[i];
    out.push_back(r);
  }
  return out;
}

json report_json(const AprioriReport& a) {
  json j;
  j["p"] = a.p;
  j["c_lp"] = a.c_lp;
  j["c_linf"] = a.c_linf;
  j["c_l1"] = a.c_l1;
  return j;
}

template <typename Fn>
RunResult guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const NaNAbort& e) {
    return {ExitCode::nan_abort, {}, e.what()};
  } catch (const AdmissibilityError& e) {
    return {ExitCode::not_admissible, {}, e.what()};
  } catch (const std::exception& e) {
    return {ExitCode::failure, {}, e.what()};
  }
}

}  // namespace

// ---------------------------------------------------------------- RunConfig

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected key=value");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  check_value(key, value);
  values_[key] = value;
}

std::string RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() ? it->second : spec_of(key).def;
}

double RunConfig::num(const std::string& key) const { return parse_number(key, str(key)); }

long RunConfig::integer(const std::string& key) const { return std::lround(num(key)); }

bool RunConfig::flag(const std::string& key) const { return parse_flag(key, str(key)); }

std::vector<int> RunConfig::int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split(str(key), ',')) out.push_back(static_cast<int>(parse_number(key, item)));
  return out;
}

std::string RunConfig::frozen() const {
  std::string out;
  for (const auto& [key, spec] : schema()) out += key + " = " + str(key) + "\n";
  return out;
}

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> d = [] {
    std::map<std::string, std::string> m;
    for (const auto& [k, s] : schema()) m[k] = s.def;
    return m;
  }();
  return d;
}

fs::path output_root(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.output_root) return *opts.output_root;
  if (const char* env = std::getenv("MHDLAB_OUTPUT_ROOT"); env && *env) return env;
  return cfg.str("output.root");
}

// ---------------------------------------------------------------- simulate

RunResult simulate(const RunConfig& cfg, const RunOptions& opts) {
  fs::path dir;
  std::vector<DiagnosticsRecord> records;
  json rep;
  auto finish = [&](int code, const std::string& message) {
    if (!dir.empty()) {
      std::ofstream os(dir / "diagnostics.csv");
      write_csv(os, records);
      rep["exit_code"] = code;
      if (!message.empty()) rep["message"] = message;
      write_json(dir / "report.json", rep);
    }
    return RunResult{code, dir, message};
  };

  try {
    grid_of(cfg);
    solver_of(cfg);
    dir = prepare_dir(cfg, opts, "simulate-" + cfg.str("scenario"));
  } catch (const std::exception& e) {
    return {ExitCode::failure, dir, e.what()};
  }

  const Grid g = grid_of(cfg);
  const SolverConfig solver = solver_of(cfg);
  const double p = cfg.num("output.p");
  const double holder_s = cfg.num("output.holder");
  rep["version"] = kVersion;
  rep["scenario"] = cfg.str("scenario");

  std::optional<Scenario> sc;
  try {
    sc = build_scenario(cfg, opts, g);
  } catch (const AdmissibilityError& e) {
    rep["admissible"] = false;
    return finish(ExitCode::not_admissible, e.what());
  } catch (const std::exception& e) {
    return finish(ExitCode::failure, e.what());
  }
  if (sc->patch) {
    rep["admissible"] = sc->patch->admissible;
    rep["initial_tangency"] = sc->patch->tangency;
    rep["equiv1_eta"] = sc->patch->eta;
    rep["equiv1_delta"] = sc->patch->delta;
  }

  Simulation sim(sc->state, solver);
  const bool markers = sc->shape.has_value();
  const bool hamiltonian = sc->patch.has_value();
  std::vector<double> phi_at_markers;
  double phi_range = 0.0;
  if (markers) sim.tracers().markers = boundary_markers(*sc->shape, static_cast<int>(cfg.integer("output.markers")));
  if (hamiltonian) {
    const ScalarField& phi0 = sc->patch->phi0;
    sim.tracers().scalars.push_back(phi0);
    phi_at_markers = PointEvaluator(forward(phi0)).values(sim.tracers().markers);
    phi_range = phi0.values.maxCoeff() - phi0.values.minCoeff();
  }

  const ScalarField omega0 = sc->state.omega;
  const double e0 = energy(sc->state);
  const double p0 = lp_norm(omega0, p);
  const long diag_every = std::max(1L, cfg.integer("output.diag_every"));
  const long snap_every = cfg.integer("output.every");

  auto record = [&](const Simulation& s) {
    DiagnosticsRecord r = basic_record(s.state(), p, holder_s);
    if (markers && hamiltonian) {
      const std::vector<Point> pts = s.wrapped_markers();
      r.tangency = contour_tangency(derive_fields(s.state()).b, pts);
      const std::vector<double> now = PointEvaluator(forward(s.tracers().scalars[0])).values(pts);
      double worst = 0.0;
      for (size_t i = 0; i < now.size(); ++i) worst = std::max(worst, std::abs(now[i] - phi_at_markers[i]));
      r.frozen_in = phi_range > 0.0 ? worst / phi_range : 0.0;
      const ConormalNorms cn = conormal_norms(perp_gradient(s.tracers().scalars[0]), s.state(), p);
      r.conormal_omega = cn.dx_omega;
      r.conormal_j = cn.dx_j;
    }
    records.push_back(r);
  };
  auto snapshot = [&](const Simulation& s) {
    Snapshot snap(g);
    snap.add("omega", s.state().omega);
    snap.add("j", s.state().j);
    if (hamiltonian) snap.add("phi", s.tracers().scalars[0]);
    write_snapshot(dir / ("snapshot_" + step_tag(s.steps()) + ".mhdp"), snap);
    if (markers) write_contour(dir / ("contour_" + step_tag(s.steps()) + ".csv"), s.wrapped_markers());
  };

  try {
    record(sim);
    snapshot(sim);
    sim.run([&](const Simulation& s) {
      const bool last = s.done();
      try {
        if (last || s.steps() % diag_every == 0) record(s);
      } catch (const std::domain_error&) {
        // A finite but overflowing state shows up first in the products.
        throw NaNAbort(s.steps(), "non-finite diagnostics at step " + std::to_string(s.steps()));
      }
      if (last || (snap_every > 0 && s.steps() % snap_every == 0)) snapshot(s);
      if (opts.log && (last || s.steps() % 100 == 0)) {
        *opts.log << "step " << s.steps() << " t=" << s.time() << '\n';
      }
    });
  } catch (const NaNAbort& e) {
    rep["abort_step"] = e.step();
    return finish(ExitCode::nan_abort, e.what());
  } catch (const std::exception& e) {
    return finish(ExitCode::failure, e.what());
  }
  if (sim.steps() == 0) snapshot(sim);

  rep["steps"] = sim.steps();
  rep["t_final"] = sim.time();
  const MHDState& fin = sim.state();
  json checks = json::array();
  const double e1 = energy(fin);
  checks.push_back(check("energy drift |e(t)-e(0)|/e(0)", e0 > 0.0 ? std::abs(e1 - e0) / e0 : std::abs(e1), 1e-6));
  if (cfg.str("scenario") == "equal") {
    const double s0 = omega0.sup();
    checks.push_back(check("equal-domain stationarity sup|w(t)-w(0)|/sup|w0|",
                           (fin.omega - omega0).sup() / std::max(s0, 1e-300), 1e-8));
  }
  if (p0 > 0.0 && fin.j.sup() == 0.0) {
    checks.push_back(check("Euler Lp conservation of vorticity (relative)", std::abs(lp_norm(fin.omega, p) - p0) / p0, 1e-6));
  }
  if (hamiltonian) {
    const double bmax = sc->patch->b0.sup();
    checks.push_back(check("frozen-in: transported Hamiltonian at markers / range", records.back().frozen_in, 1e-4));
    checks.push_back(check("contour tangency |b.n| (bound: 3 x initial + 1e-3 max|b0|)", records.back().tangency,
                           3.0 * records.front().tangency + 1e-3 * bmax));
  }
  if (markers && !hamiltonian) {
    const double a0 = sc->shape->area();
    const double a1 = polygon_area(sim.tracers().markers);
    checks.push_back(check("contour area drift (relative)", std::abs(a1 - a0) / a0, 5e-3));
  }
  rep["checks"] = checks;
  std::vector<std::string> untracked;
  if (!hamiltonian) untracked = {"tangency", "frozen_in", "conormal_omega", "conormal_j"};
  rep["untracked_columns"] = untracked;
  if (records.size() >= 2) rep["apriori"] = report_json(apriori_envelope(records));
  log_line(opts, "run complete: " + dir.string());
  return finish(ExitCode::ok, "");
}

// ---------------------------------------------------------------- identities

RunResult identities(const RunConfig& cfg, const RunOptions& opts) {
  return guarded([&]() -> RunResult {
    const Grid g = grid_of(cfg);
    const fs::path dir = prepare_dir(cfg, opts, "identities");
    constexpr double kTol = 1e-8, kMask = 0.1, kHvv = 1e-13;
    const double h = cfg.num("init.h_cells") * g.spacing();
    const Point c = g.center();

    struct Row {
      std::string name;
      IdentityResiduals res;
      double h_vv = 0.0;
    };
    std::vector<std::string> names = {"single-mode", "disc-patch", "ellipse-patch", "random"};
    std::vector<Row> rows(names.size());
    parallel_for(names.size(), opts.jobs, [&](size_t i) {
      const std::string& name = names[i];
      std::optional<MHDState> state;
      std::optional<VectorField> X;
      if (name == "single-mode") {
        const double k = g.wavenumber(1);
        state.emplace(ScalarField::sample(g, [k](double x, double y) { return std::cos(k * x) * std::cos(2 * k * y); }),
                      ScalarField::sample(g, [k](double x, double y) { return std::sin(2 * k * x + k * y); }));
        X.emplace(perp_gradient(ScalarField::sample(g, [k](double x, double y) { return std::sin(k * x) + std::cos(k * y); })));
      } else if (name == "random") {
        Ensemble ens;
        ens.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
        const Grid unit(g.n(), 2.0 * std::numbers::pi);
        state.emplace(mean_projected(ens.member(unit, 0, 0)), mean_projected(ens.member(unit, 0, 1)));
        X.emplace(perp_gradient(ens.member(unit, 0, 2, 3.0)));
      } else {
        const double scale = std::min(1.0, 0.2 * g.length());
        const ShapeSpec s = name == "disc-patch" ? ShapeSpec::disc(c, 0.75 * scale)
                                                 : ShapeSpec::ellipse(c, scale, 0.5 * scale);
        const PatchData pd = make_patch(s, h, g, false);
        state.emplace(pd.state());
        X.emplace(pd.b0);
      }
      rows[i].name = name;
      rows[i].res = identity_residuals(*X, *state, kMask);
      const DerivedFields d = derive_fields(*state);
      const double scale = std::pow(gradient_sup(d.grad_v), 2);
      rows[i].h_vv = scale > 0.0 ? bilinear_h(d.grad_v, d.grad_v).sup() / scale : 0.0;
    });

    json rep;
    rep["version"] = kVersion;
    rep["thresholds"] = {{"riesz_identities_relative", kTol},
                         {"source_decomposition_relative", kTol},
                         {"evaluation_mask_fraction_of_max_X", kMask},
                         {"H(v,v)_relative", kHvv}};
    json checks = json::array();
    std::ofstream csv(dir / "identities.csv");
    csv << "scenario,riesz_identities,source_decomposition,points,h_vv\n";
    bool all = true;
    for (const Row& r : rows) {
      csv << r.name << ',' << format_double(r.res.yasser) << ',' << format_double(r.res.iden1) << ',' << r.res.points
          << ',' << format_double(r.h_vv) << '\n';
      checks.push_back(check(r.name + ": Riesz identities through the co-normal derivative", r.res.yasser, kTol));
      checks.push_back(check(r.name + ": bilinear source decomposition along X", r.res.iden1, kTol));
      checks.push_back(check(r.name + ": H(v,v) vanishes", r.h_vv, kHvv));
      all = all && r.res.yasser <= kTol && r.res.iden1 <= kTol && r.h_vv <= kHvv;
    }
    rep["checks"] = checks;
    write_json(dir / "report.json", rep);
    log_line(opts, std::string("identities ") + (all ? "pass" : "FAIL") + ": " + dir.string());
    return {all ? ExitCode::ok : ExitCode::failure, dir, all ? "" : "identity residual above threshold"};
  });
}

// ---------------------------------------------------------------- stationary

RunResult stationary(const RunConfig& cfg, const RunOptions& opts) {
  return guarded([&]() -> RunResult {
    VerdictRequest req;
    req.kind = parse_stationary_case(cfg.str("stationary.case"));
    req.r = cfg.num("stationary.r");
    req.R = cfg.num("stationary.R");
    req.d = cfg.num("stationary.d");
    req.accuracy = cfg.num("stationary.accuracy");
    req.samples = static_cast<int>(cfg.integer("stationary.samples"));
    if (req.kind == StationaryCase::mhd_equal) req.shape = shape_of(cfg, Point::Zero());
    const fs::path dir = prepare_dir(cfg, opts, "stationary-" + cfg.str("stationary.case"));
    const VerdictReport v = stationarity_verdict(req);

    std::ofstream map(dir / "source_map.csv");
    map << "x,y,source\n";
    for (const auto& s : v.map) {
      map << format_double(s.x.x()) << ',' << format_double(s.x.y()) << ',' << format_double(s.source) << '\n';
    }
    json rep;
    rep["version"] = kVersion;
    rep["case"] = v.case_name;
    rep["sheet"] = v.sheet;
    rep["source"] = v.source;
    rep["residual"] = v.residual;
    rep["euler_reference"] = v.euler_reference;
    rep["floor"] = v.floor;
    rep["threshold"] = v.threshold;
    rep["verdict"] = v.stationary ? "stationary" : "non-stationary";
    json checks = json::array();
    checks.push_back(check("normalized right-hand side of the sharp-patch system", v.residual, v.threshold));

    if (req.kind == StationaryCase::mhd_equal || req.kind == StationaryCase::euler_disc) {
      const ShapeSpec s = req.shape ? *req.shape : ShapeSpec::disc(Point::Zero(), req.r);
      QuadratureOptions q;
      q.accuracy = req.accuracy;
      const BoundaryConstancy bc = boundary_constancy(QuadratureDomain(s, q), req.samples);
      rep["boundary_potential_mean"] = bc.mean;
      rep["boundary_potential_stddev"] = bc.stddev;
      rep["boundary_potential_constant"] = bc.stddev <= 2.0 * req.accuracy;
    }
    rep["checks"] = checks;
    write_json(dir / "report.json", rep);
    log_line(opts, v.case_name + ": residual " + format_double(v.residual) + " -> " +
                       (v.stationary ? "stationary" : "non-stationary"));
    return {ExitCode::ok, dir, ""};
  });
}

// ---------------------------------------------------------------- bench

RunResult bench_estimates(const RunConfig& cfg, const RunOptions& opts) {
  return guarded([&]() -> RunResult {
    Ensemble ens;
    ens.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    ens.count = static_cast<int>(cfg.integer("bench.count"));
    ens.exponent = cfg.num("bench.exponent");
    ens.sizes = cfg.int_list("bench.sizes");
    const std::string which = cfg.str("bench.lemma");
    const std::vector<std::string> lemmas =
        which == "all" ? std::vector<std::string>{"lb", "ce", "cald1", "cald2", "an1"} : std::vector<std::string>{which};
    const fs::path dir = prepare_dir(cfg, opts, "bench-" + which);

    json rep;
    rep["version"] = kVersion;
    json checks = json::array();
    bool all = true;
    for (const auto& lemma : lemmas) {
      const RatioReport r = run_lemma(lemma, ens, opts.jobs);
      std::ofstream csv(dir / ("ratios_" + lemma + ".csv"));
      csv << "bound,n,member,block,ratio\n";
      auto dump = [&csv](const char* bound, const std::vector<RatioSample>& ss) {
        for (const auto& s : ss) {
          csv << bound << ',' << s.n << ',' << s.member << ',' << s.block << ',' << format_double(s.ratio) << '\n';
        }
      };
      dump("upper", r.samples);
      dump("lower", r.lower_samples);
      json lj;
      json sizes = json::array();
      for (const auto& s : r.sizes) sizes.push_back({{"n", s.n}, {"max", s.max}, {"median", s.median}, {"min", s.min}});
      lj["sizes"] = sizes;
      if (!r.lower.empty()) {
        json lower = json::array();
        for (const auto& s : r.lower) lower.push_back({{"n", s.n}, {"max", s.max}, {"median", s.median}});
        lj["reverse_bound"] = lower;
      }
      lj["growth"] = r.growth;
      lj["stable"] = r.stable;
      lj["notes"] = r.notes;
      rep[lemma] = lj;
      double worst = 0.0;
      for (double gr : r.growth) worst = std::max(worst, gr);
      checks.push_back(check(lemma + ": max ratio growth per grid doubling", worst, 1.10));
      all = all && r.stable;
      log_line(opts, lemma + (r.stable ? ": stable" : ": UNSTABLE"));
    }
    rep["checks"] = checks;
    write_json(dir / "report.json", rep);
    return {all ? ExitCode::ok : ExitCode::failure, dir, all ? "" : "ratio growth above 10% per doubling"};
  });
}

// ---------------------------------------------------------------- report

RunResult report(const fs::path& run_dir, const std::optional<fs::path>& against,
                 const std::optional<fs::path>& golden, const RunOptions& opts) {
  return guarded([&]() -> RunResult {
    const auto records = read_diagnostics(run_dir / "diagnostics.csv");
    const AprioriReport a = apriori_envelope(records);
    json rep;
    rep["version"] = kVersion;
    rep["apriori"] = report_json(a);
    json checks = json::array();
    bool ok = true;
    if (against) {
      const AprioriReport b = apriori_envelope(read_diagnostics(*against / "diagnostics.csv"));
      rep["apriori_against"] = report_json(b);
      const double drift = envelope_drift(a, b);
      checks.push_back(check("a priori constants: relative drift between runs", drift, 0.2));
      ok = ok && drift <= 0.2;
    }
    if (golden) {
      auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + p.string());
        return std::string(std::istreambuf_iterator<char>(in), {});
      };
      const bool same = slurp(run_dir / "diagnostics.csv") == slurp(*golden);
      json c;
      c["check"] = "diagnostics identical to golden file";
      c["pass"] = same;
      checks.push_back(c);
      ok = ok && same;
    }
    rep["checks"] = checks;
    write_json(run_dir / "apriori.json", rep);
    log_line(opts, "C_lp=" + format_double(a.c_lp) + " C_linf=" + format_double(a.c_linf) +
                       " C_l1=" + format_double(a.c_l1));
    return {ok ? ExitCode::ok : ExitCode::failure, run_dir, ok ? "" : "report check failed"};
  });
}

}  // namespace mhd::cli
