#include "doctest.h"

#include "mhdlab/bench.hpp"
#include "mhdlab/diagnostics.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/patch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace mhd;

namespace {

const double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

ScalarField disc(const Grid& g, Point c, double r) {
  return mean_projected(indicator(ShapeSpec::disc(c, r), 4 * g.spacing(), g));
}

}  // namespace

TEST_CASE("Lp norms") {
  const Grid g(64, 2 * kPi);
  const ScalarField one = ScalarField::constant(g, 1.0);
  CHECK(lp_norm(one, 1.0) == doctest::Approx(4 * kPi * kPi));
  CHECK(lp_norm(one, 2.0) == doctest::Approx(2 * kPi));
  CHECK(lp_norm(one, 4.0) == doctest::Approx(std::sqrt(2 * kPi)));
  CHECK(lp_norm(one, kInf) == 1.0);
  const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
  // |cos|_2^2 = 2 pi^2, |cos|_4^4 = 3 pi^2 / 2.
  CHECK(lp_norm(c, 2.0) == doctest::Approx(std::sqrt(2.0) * kPi));
  CHECK(lp_norm(c, 4.0) == doctest::Approx(std::pow(1.5 * kPi * kPi, 0.25)));
  CHECK(lp_norm(c, 1.0) == doctest::Approx(8 * kPi).epsilon(1e-3));
  CHECK_THROWS_AS(lp_norm(c, 0.5), std::invalid_argument);
}

TEST_CASE("Holder norms") {
  const Grid g(128, 2 * kPi);
  CHECK_THROWS_AS(holder_norm(ScalarField(g), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(holder_modulus(ScalarField(g), 0.0), std::invalid_argument);
  CHECK(holder_norm(ScalarField(g), 0.5) == 0.0);
  // The low-frequency block carries weight 2^-s.
  CHECK(holder_norm(ScalarField::constant(g, 2.0), 0.5) == doctest::Approx(2.0 / std::sqrt(2.0)));

  // A single mode of wavenumber k sits in one block: the norm scales like k^s.
  auto mode = [&g](int k) { return ScalarField::sample(g, [k](double x, double) { return std::cos(k * x); }); };
  const double h4 = holder_norm(mode(4), 0.5), h16 = holder_norm(mode(16), 0.5);
  CHECK(h16 / h4 == doctest::Approx(2.0).epsilon(0.05));

  // Block and difference characterizations agree up to a moderate factor.
  Ensemble e;
  for (int m = 0; m < 3; ++m) {
    const ScalarField f = e.member(g, m, 0, 2.0);
    for (double s : {0.3, 0.5, 0.7}) {
      const double ratio = holder_norm(f, s) / holder_modulus(f, s);
      CHECK(ratio >= 1.0 / 8);
      CHECK(ratio <= 8.0);
    }
  }
  // A jump has no finite Holder norm: it grows with resolution.
  const double coarse = holder_modulus(disc(Grid(64, 2 * kPi), Point(kPi, kPi), 1.0), 0.5);
  const double fine = holder_modulus(disc(Grid(256, 2 * kPi), Point(kPi, kPi), 1.0), 0.5);
  CHECK(fine > 1.5 * coarse);
}

TEST_CASE("energy and gradients") {
  const Grid g(64, 2 * kPi);
  // omega = cos x gives v = (0, sin x) and energy (1/2) 2 pi^2.
  const auto w = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
  CHECK(energy(MHDState(w, ScalarField(g))) == doctest::Approx(kPi * kPi));
  CHECK(energy(MHDState(w, w)) == doctest::Approx(2 * kPi * kPi));
  const DerivedFields d = derive_fields(MHDState(w, ScalarField(g)));
  CHECK(gradient_sup(d.grad_v) == doctest::Approx(1.0));
}

TEST_CASE("stationarity residual") {
  const Grid g(256, 2 * kPi);
  const ScalarField w = disc(g, g.center(), 0.75);
  const StationarityResidual eq = stationarity_residual(MHDState(w, w));
  CHECK(eq.l2_omega <= 1e-12);
  CHECK(eq.l2_j <= 1e-12);

  const StationarityResidual euler = stationarity_residual(MHDState(w, ScalarField(g)));
  CHECK(euler.relative <= 1e-3);

  const MHDState conc = concentric_state(0.5, 0.8, g, 4 * g.spacing());
  const StationarityResidual c = stationarity_residual(conc);
  const ScalarField shifted = disc(g, g.center() + Point(0.4, 0.0), 0.8);
  const StationarityResidual off = stationarity_residual(MHDState(disc(g, g.center(), 0.5), shifted));
  CHECK(off.relative >= 10 * c.relative);
  CHECK(off.relative > 0.01);

  const StationarityResidual zero = stationarity_residual(MHDState(ScalarField(g), ScalarField(g)));
  CHECK(zero.relative == 0.0);
}

TEST_CASE("co-normal norms") {
  const Grid g(128, 2 * kPi);
  const Hamiltonian H = level_set_hamiltonian(ShapeSpec::disc(g.center(), 0.75), 4 * g.spacing(), g);
  const ScalarField chi = mean_projected(H.phi0);
  const ConormalNorms n = conormal_norms(H.b0, MHDState(chi, ScalarField(g)), 4.0);
  // A function of phi0 is constant along its Hamiltonian field.
  CHECK(n.dx_omega <= 1e-8 * H.b0.sup() * chi.sup());
  CHECK(n.dx_j == 0.0);
  CHECK(n.wpx_omega >= lp_norm(chi, kInf));
  CHECK(n.wpx_j == 0.0);
  // A shifted patch is not.
  const ScalarField other = disc(g, g.center() + Point(0.3, 0.0), 0.75);
  CHECK(conormal_norms(H.b0, MHDState(other, ScalarField(g)), 4.0).dx_omega > 0.1);
}

TEST_CASE("diagnostics record and CSV") {
  const Grid g(64, 2 * kPi);
  Ensemble e;
  const MHDState s(e.member(g, 0, 0, 3.0), e.member(g, 0, 1, 3.0), 0.25);
  const DiagnosticsRecord r = basic_record(s, 4.0);
  CHECK(r.t == 0.25);
  CHECK(r.omega_lp == doctest::Approx(lp_norm(s.omega, 4.0)));
  CHECK(r.grad_sup == doctest::Approx(r.grad_v_sup + r.grad_b_sup));
  CHECK(r.energy == doctest::Approx(energy(s)));
  CHECK(r.holder_j == doctest::Approx(holder_norm(s.j, 0.5)));

  std::ostringstream os;
  write_csv(os, {r, r});
  const std::string text = os.str();
  CHECK(text.rfind(csv_header() + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  const std::string row = csv_row(r), header = csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  CHECK(row == csv_row(basic_record(s, 4.0)));
}

TEST_CASE("a priori envelope") {
  CHECK_THROWS_AS(apriori_envelope({}), std::invalid_argument);
  DiagnosticsRecord a;
  a.omega_lp = a.omega_linf = a.omega_l1 = a.omega_l2 = 1.0;
  DiagnosticsRecord b = a;
  CHECK_THROWS_AS(apriori_envelope({a, b}), std::invalid_argument);

  // Constant norms fit with C = 1.
  b.t = 1.0;
  const AprioriReport flat = apriori_envelope({a, b});
  CHECK(flat.c_lp == 1.0);
  CHECK(flat.c_linf == 1.0);
  CHECK(flat.c_l1 == 1.0);

  // Growth without any velocity gradient must be absorbed by C.
  b.omega_lp = 3.0;
  b.omega_linf = 2.0;
  const AprioriReport grown = apriori_envelope({a, b});
  CHECK(grown.c_lp == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(grown.c_linf == doctest::Approx(2.0));
  CHECK(envelope_drift(flat, grown) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(envelope_drift(grown, grown) == 0.0);

  // On a real run the fitted constants satisfy their inequalities.
  const Grid g(64, 2 * kPi);
  Ensemble e;
  SolverConfig cfg;
  cfg.t_end = 0.3;
  Simulation sim(MHDState(e.member(g, 0, 0, 3.0), e.member(g, 0, 1, 3.0)), cfg);
  std::vector<DiagnosticsRecord> recs{basic_record(sim.state(), 4.0)};
  sim.run([&](const Simulation& s) { recs.push_back(basic_record(s.state(), 4.0)); });
  const AprioriReport rep = apriori_envelope(recs);
  CHECK(rep.p == 4.0);
  CHECK(rep.c_lp >= 1.0);
  CHECK(rep.c_lp <= 2.0);
  CHECK(rep.c_linf <= 2.0);
}
