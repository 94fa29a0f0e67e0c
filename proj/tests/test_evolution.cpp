#include "doctest.h"

#include "mhdlab/bench.hpp"
#include "mhdlab/diagnostics.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/patch.hpp"

#include <cmath>
#include <numbers>

using namespace mhd;

namespace {

const double kPi = std::numbers::pi;

double sup_diff(const ScalarField& a, const ScalarField& b) { return (a.values - b.values).abs().maxCoeff(); }

MHDState random_state(const Grid& g, int seed = 5) {
  Ensemble e;
  e.seed = seed;
  return MHDState(e.member(g, 0, 0, 3.0), e.member(g, 0, 1, 3.0));
}

MHDState run_to(const MHDState& s0, double t, double dt) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t;
  Simulation sim(s0, cfg);
  sim.run();
  return sim.state();
}

// Solid-body-like swirl with angular speed f(r).
VectorField swirl(const Grid& g, double (*f)(double)) {
  const Point c = g.center();
  auto comp = [&](int i) {
    return ScalarField::sample(g, [&, i](double x, double y) {
      const double dx = x - c.x(), dy = y - c.y();
      const double s = f(std::hypot(dx, dy));
      return i == 0 ? -dy * s : dx * s;
    });
  };
  return {comp(0), comp(1), true};
}

double gauss(double r) { return std::exp(-r * r / 0.5); }

}  // namespace

TEST_CASE("solver configuration") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.cfl = 0.9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dt = 0.01;
  CHECK_NOTHROW(c.validate());
  c.dt = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("zero state stays zero") {
  const Grid g(32, 2 * kPi);
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  Simulation sim{MHDState(ScalarField(g), ScalarField(g)), cfg};
  sim.run();
  CHECK(sim.steps() == 10);
  CHECK(sim.time() == doctest::Approx(1.0));
  CHECK(sim.state().omega.sup() == 0.0);
  CHECK(sim.state().j.sup() == 0.0);
}

TEST_CASE("equal fields are stationary") {
  const Grid g(128, 2 * kPi);
  const ScalarField chi =
      mean_projected(indicator(ShapeSpec::ellipse(g.center(), 1.0, 0.5), 4 * g.spacing(), g));
  const MHDState s0(chi, chi);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  Simulation sim(s0, cfg);
  sim.run();
  CHECK(sim.steps() == 100);
  CHECK(sup_diff(sim.state().omega, s0.omega) <= 1e-12);
  CHECK(sup_diff(sim.state().j, s0.j) <= 1e-12);
}

TEST_CASE("fourth-order convergence in time") {
  const Grid g(32, 2 * kPi);
  const MHDState s0 = random_state(g);
  const double t = 0.4;
  const MHDState ref = run_to(s0, t, t / 160);
  const double e1 = sup_diff(run_to(s0, t, t / 10).omega, ref.omega);
  const double e2 = sup_diff(run_to(s0, t, t / 20).omega, ref.omega);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.6);
  CHECK(order <= 4.4);
}

TEST_CASE("elsasser and primitive schemes agree") {
  const Grid g(32, 2 * kPi);
  const MHDState s0 = random_state(g);
  SolverConfig cfg;
  const MHDState a = step(s0, 0.01, cfg);
  const MHDState b = step_elsasser(s0, 0.01, cfg);
  CHECK(sup_diff(a.omega, b.omega) <= 1e-12);
  CHECK(sup_diff(a.j, b.j) <= 1e-12);
}

TEST_CASE("conserved and bounded quantities") {
  const Grid g(64, 2 * kPi);
  const MHDState s0 = random_state(g, 9);
  SolverConfig cfg;
  cfg.cfl = 0.2;
  cfg.t_end = 0.5;
  Simulation sim(s0, cfg);
  sim.run();
  const MHDState& s = sim.state();
  CHECK(std::abs(energy(s) - energy(s0)) <= 1e-5 * energy(s0));
  CHECK(std::abs(s.omega.mean()) <= 1e-13);
  CHECK(std::abs(s.j.mean()) <= 1e-13);

  // Pure Euler: the vorticity extrema do not grow (up to spectral wiggles).
  const MHDState e0(s0.omega, ScalarField(g));
  Simulation euler(e0, cfg);
  euler.run();
  CHECK(euler.state().omega.values.maxCoeff() <= e0.omega.values.maxCoeff() * 1.01);
  CHECK(euler.state().omega.values.minCoeff() >= e0.omega.values.minCoeff() * 1.01);
}

TEST_CASE("marker advection in prescribed velocities") {
  const Grid g(128, 2 * kPi);
  const Point c = g.center();
  Tracers tr;
  tr.markers = {c + Point(1.0, 0.0), c + Point(0.0, 0.5)};
  const VectorField v = swirl(g, gauss);
  const double T = 1.0;
  for (int i = 0; i < 100; ++i) advect(tr, v, T / 100);
  // Rotation with angular speed f(r).
  for (int i = 0; i < 2; ++i) {
    const double r = i == 0 ? 1.0 : 0.5;
    const double th = (i == 0 ? 0.0 : kPi / 2) + gauss(r) * T;
    CHECK((tr.markers[i] - (c + r * Point(std::cos(th), std::sin(th)))).norm() <= 1e-6);
  }

  Tracers still;
  still.markers = {Point(1, 2)};
  advect(still, VectorField(g), 1.0);
  CHECK(still.markers[0] == Point(1, 2));

  // Uniform translation leaves the box: markers stay unwrapped.
  Tracers moving;
  moving.markers = {Point(6.0, 1.0)};
  const VectorField u(ScalarField::constant(g, 1.0), ScalarField(g), true);
  for (int i = 0; i < 10; ++i) advect(moving, u, 0.1);
  CHECK(moving.markers[0].x() == doctest::Approx(7.0));
  CHECK(moving.markers[0].y() == doctest::Approx(1.0));
}

TEST_CASE("scalar transport") {
  const Grid g(128, 2 * kPi);
  const Point c = g.center();
  // Spectrally divergence-free version of the swirl, from its stream function.
  const VectorField v = perp_gradient(ScalarField::sample(g, [&](double x, double y) {
    const double r = std::hypot(x - c.x(), y - c.y());
    return -0.25 * std::exp(-2.0 * r * r);
  }));
  Tracers tr;
  tr.scalars.push_back(ScalarField::sample(g, [&](double x, double y) {
    const double r = std::hypot(x - c.x(), y - c.y());
    return std::exp(-r * r);
  }));
  tr.scalars.push_back(ScalarField::constant(g, 3.0));
  const ScalarField radial0 = tr.scalars[0];
  for (int i = 0; i < 20; ++i) advect(tr, v, 0.05);
  // A radial profile is invariant under a radial swirl.
  CHECK(sup_diff(tr.scalars[0], radial0) <= 1e-6);
  CHECK(sup_diff(tr.scalars[1], ScalarField::constant(g, 3.0)) <= 1e-12);
}

TEST_CASE("simulation drives tracers with the flow") {
  const Grid g(64, 2 * kPi);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 0.5;
  Simulation zero{MHDState(ScalarField(g), ScalarField(g)), cfg};
  zero.tracers().markers = {Point(1, 1), Point(7, -1)};
  zero.run();
  CHECK(zero.tracers().markers[0] == Point(1, 1));
  const auto w = zero.wrapped_markers();
  CHECK(w[1].x() == doctest::Approx(7 - 2 * kPi));
  CHECK(w[1].y() == doctest::Approx(2 * kPi - 1));

  SolverConfig els = cfg;
  els.scheme = Scheme::elsasser;
  Simulation bad{MHDState(ScalarField(g), ScalarField(g)), els};
  bad.tracers().markers = {Point(1, 1)};
  CHECK_THROWS_AS(bad.advance(), std::invalid_argument);
}

TEST_CASE("pushforward") {
  const Grid g(64, 2 * kPi);
  const Hamiltonian H = level_set_hamiltonian(ShapeSpec::disc(g.center(), 0.75), 4 * g.spacing(), g);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 0.2;
  Simulation zero{MHDState(ScalarField(g), ScalarField(g)), cfg};
  zero.keep_history(true);
  zero.run();
  CHECK(zero.history().size() == 4);
  const Pushforward p = pushforward(H.b0, zero.history());
  CHECK(sup_diff(p.direct.x, H.b0.x) <= 1e-12);
  CHECK(sup_diff(p.direct.y, H.b0.y) <= 1e-12);
  CHECK(sup_diff(p.from_stream.x, H.b0.x) <= 1e-10 * H.b0.sup());

  CHECK_THROWS_AS(pushforward(VectorField(Grid(32, 2 * kPi)), zero.history()), std::invalid_argument);
}

TEST_CASE("cut-off construction") {
  const std::vector<Interval> A{{0.0, 0.2}}, B{{0.8, 1.0}};
  CHECK(cutoff_profile(0.1, A, B) == 0.0);
  CHECK(cutoff_profile(0.9, A, B) == 1.0);
  CHECK(cutoff_profile(0.5, A, B) == doctest::Approx(0.5));
  const Grid g(32, 2 * kPi);
  const auto phi = ScalarField::sample(g, [](double x, double) { return 0.5 + 0.5 * std::sin(x); });
  const ScalarField cut = build_cutoff(phi, A, B);
  CHECK(cut.values.minCoeff() >= 0.0);
  CHECK(cut.values.maxCoeff() <= 1.0);
  CHECK_THROWS_AS(build_cutoff(phi, {{0.0, 0.5}}, {{0.4, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_cutoff(phi, {}, B), std::invalid_argument);
}

TEST_CASE("polygon area") {
  const Grid g(32, 2 * kPi);
  const auto pts = boundary_markers(ShapeSpec::disc(Point::Zero(), 1.0), 2048);
  CHECK(polygon_area(pts) == doctest::Approx(kPi).epsilon(1e-5));
  CHECK(polygon_area({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}) == 1.0);
}

TEST_CASE("strict CFL and NaN detection") {
  const Grid g(32, 2 * kPi);
  const MHDState s0 = random_state(g);
  SolverConfig cfg;
  cfg.dt = 10.0;
  cfg.t_end = 10000.0;
  cfg.strict_cfl = true;
  Simulation strict(s0, cfg);
  CHECK_THROWS_AS(strict.advance(), CflViolation);

  cfg.strict_cfl = false;
  Simulation blow(MHDState(1e3 * s0.omega, 1e3 * s0.j), cfg);
  bool aborted = false;
  try {
    blow.run();
  } catch (const NaNAbort& e) {
    aborted = true;
    CHECK(e.step() >= 1);
  }
  CHECK(aborted);
}

TEST_CASE("CFL step selection") {
  const Grid g(32, 2 * kPi);
  const MHDState s0 = random_state(g);
  SolverConfig cfg;
  cfg.cfl = 0.4;
  Simulation sim(s0, cfg);
  CHECK(sim.next_dt() == doctest::Approx(0.4 * g.spacing() / max_speed(s0)));
  CHECK(std::isinf(cfl_dt(MHDState(ScalarField(g), ScalarField(g)), 0.5)));
}
