#include "doctest.h"

#include "mhdlab/bench.hpp"
#include "mhdlab/fields.hpp"

#include <cmath>
#include <numbers>

using namespace mhd;

namespace {

const double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();
const Grid G64(64, 2 * kPi);

ScalarField cos1(const Grid& g) { return ScalarField::sample(g, [](double x, double) { return std::cos(x); }); }
ScalarField cos2(const Grid& g) { return ScalarField::sample(g, [](double, double y) { return std::cos(y); }); }

Ensemble small() {
  Ensemble e;
  e.seed = 3;
  e.count = 4;
  e.sizes = {32, 64};
  return e;
}

}  // namespace

TEST_CASE("ensemble members") {
  const Ensemble e;
  const ScalarField a = e.member(G64, 0, 0);
  CHECK(a.values.isApprox(e.member(G64, 0, 0).values, 0.0));
  CHECK(std::abs(a.mean()) <= 1e-14);
  CHECK((a.values - e.member(G64, 1, 0).values).abs().maxCoeff() > 0.1);
  CHECK((a.values - e.member(G64, 0, 1).values).abs().maxCoeff() > 0.1);
  // Nested across sizes: the modes shared by both grids carry the same phase.
  const Spectrum s64 = forward(a);
  const Spectrum s128 = forward(e.member(Grid(128, 2 * kPi), 0, 0));
  const double scale = 128.0 * 128.0 / (64.0 * 64.0);
  CHECK(std::abs(s128.coeffs(3, 5) - scale * s64.coeffs(3, 5)) <= 1e-9 * std::abs(s128.coeffs(3, 5)));

  Spectrum m(G64);
  add_mode(m, 2, -1, std::complex<double>(64.0 * 64.0 / 2, 0.0));
  const ScalarField mode = inverse(m);
  const auto expect = ScalarField::sample(G64, [](double x, double y) { return std::cos(2 * x - y); });
  CHECK((mode.values - expect.values).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("Bernstein ratio on single modes") {
  for (int q : {1, 2, 3, 4}) {
    const int k = 1 << q;
    const auto u = ScalarField::sample(G64, [k](double x, double) { return std::sin(k * x); });
    const double r = bernstein_ratio(u, q, 1, kInf, kInf);
    CHECK(r >= 0.25);
    CHECK(r <= 4.0);
    const double lo = bernstein_ratio(u, q, 1, kInf, kInf, true);
    CHECK(lo >= 0.25);
    CHECK(lo <= 4.0);
    CHECK(bernstein_ratio(u, q, 0, kInf, kInf) == doctest::Approx(1.0));
  }
}

TEST_CASE("commutators vanish for constant multipliers") {
  const Ensemble e;
  const ScalarField c = ScalarField::constant(G64, 1.7);
  const ScalarField g = e.member(G64, 0, 1);
  CHECK(convolution_commutator_lhs(0.5, c, g, 2.0) <= 1e-12);
  CHECK(calderon_lp_commutator(c, g, 1, 2, 1).sup() <= 1e-12);
  CHECK(calderon_holder_commutator(c, g, 1, 1).sup() <= 1e-12);
  const VectorField v = perp_gradient(e.member(G64, 0, 2, 3.0));
  CHECK(transport_commutator(v, ScalarField::constant(G64, 2.0), 1).sup() <= 1e-12);
  CHECK(transport_commutator(VectorField(G64), e.member(G64, 0, 3), 1).sup() <= 1e-12);
}

TEST_CASE("bump kernel") {
  const ScalarField h = bump_kernel(G64, 0.5);
  CHECK(h.values.sum() * G64.cell_area() == doctest::Approx(1.0));
  CHECK(h.values.minCoeff() >= 0.0);
  // A narrow bump nearly commutes with multiplication.
  const Ensemble e;
  const Grid g(256, 2 * kPi);
  const ScalarField f = e.member(g, 0, 0), gg = e.member(g, 0, 1);
  CHECK(convolution_commutator_lhs(0.05, f, gg, 2.0) < 0.2 * convolution_commutator_lhs(0.5, f, gg, 2.0));
}

TEST_CASE("Calderon commutator closed form") {
  // f = cos x1, g = cos x2, i = j = 1, k = 2: the commutator is -(1/2) cos x1 sin x2.
  const double r = calderon_lp_ratio(cos1(G64), cos2(G64), 1, 1, 2, 2.0);
  CHECK(r == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
  const ScalarField c = calderon_lp_commutator(cos1(G64), cos2(G64), 1, 1, 2);
  const auto expect = ScalarField::sample(G64, [](double x, double y) { return -0.5 * std::cos(x) * std::sin(y); });
  CHECK((c.values - expect.values).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("Holder commutator precondition") {
  const Ensemble e;
  const ScalarField f = e.member(G64, 0, 0), g = e.member(G64, 0, 1);
  CHECK_NOTHROW(calderon_holder_ratio(f, g, 1, 2, 0.5, 4.0));
  CHECK_THROWS_AS(calderon_holder_ratio(f, g, 1, 2, 0.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(calderon_holder_ratio(f, g, 1, 2, 1.0, 4.0), std::invalid_argument);
  CHECK(calderon_holder_ratio(f, g, 1, 2, 0.5, 4.0) > 0.0);
}

TEST_CASE("sweeps are deterministic across worker counts") {
  const Ensemble e = small();
  const RatioReport a = calderon_lp(e, 1, 1, 2, 4.0, 1);
  const RatioReport b = calderon_lp(e, 1, 1, 2, 4.0, 3);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.samples.size() == 8);
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].n == b.samples[i].n);
    CHECK(a.samples[i].member == b.samples[i].member);
    CHECK(a.samples[i].ratio == b.samples[i].ratio);
  }
  CHECK(a.growth == b.growth);
  CHECK(a.sizes.size() == 2);
  CHECK(a.growth.size() == 1);
}

TEST_CASE("report summary") {
  RatioReport r;
  r.samples = {{32, 0, -2, 1.0}, {32, 1, -2, 3.0}, {32, 2, -2, 2.0}, {64, 0, -2, 3.2}};
  summarize(r);
  REQUIRE(r.sizes.size() == 2);
  CHECK(r.sizes[0].max == 3.0);
  CHECK(r.sizes[0].median == 2.0);
  CHECK(r.sizes[0].min == 1.0);
  CHECK(r.growth[0] == doctest::Approx(3.2 / 3.0));
  CHECK(r.stable);
  r.samples.push_back({64, 1, -2, 4.0});
  summarize(r);
  CHECK_FALSE(r.stable);
}

TEST_CASE("lemma runner") {
  const Ensemble e = small();
  for (const char* name : {"lb", "ce", "cald1", "cald2", "an1"}) {
    const RatioReport r = run_lemma(name, e);
    CHECK(r.lemma == name);
    CHECK_FALSE(r.samples.empty());
    for (const RatioSample& s : r.samples) CHECK((std::isfinite(s.ratio) && s.ratio >= 0.0));
  }
  CHECK_THROWS_AS(run_lemma("nope", e), std::invalid_argument);
}
