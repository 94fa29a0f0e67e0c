#include "doctest.h"

#include "mhdlab/bench.hpp"
#include "mhdlab/fields.hpp"
#include "mhdlab/patch.hpp"
#include "mhdlab/util.hpp"

#include <cmath>
#include <numbers>

using namespace mhd;

namespace {

const double kPi = std::numbers::pi;
const Grid G64(64, 2 * kPi);

double sup_diff(const ScalarField& a, const ScalarField& b) { return (a.values - b.values).abs().maxCoeff(); }

ScalarField smooth_random(const Grid& g, int member, int role = 0, double expo = 3.0) {
  Ensemble e;
  e.seed = 11;
  // Keep content in the lower third so products need no dealiasing.
  Spectrum s = forward(e.member(g, member, role, expo));
  s.apply([&g](double k1, double k2, int, int) -> std::complex<double> {
    return std::max(std::abs(k1), std::abs(k2)) <= g.n() / 6 ? 1.0 : 0.0;
  });
  return mean_projected(inverse(s));
}

// f(|x - c|) (x - c)^perp for a radial profile f.
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

double gauss_a(double r) { return std::exp(-r * r / 0.3); }
double gauss_b(double r) { return (1.0 + r * r) * std::exp(-r * r / 0.25); }

}  // namespace

TEST_CASE("state construction projects the mean with a warning") {
  std::vector<std::string> seen;
  auto prev = log::set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  const MHDState s(ScalarField::constant(G64, 1.0), ScalarField(G64));
  log::set_warning_sink(prev);
  CHECK(seen.size() == 1);
  CHECK(s.omega.sup() == 0.0);
  CHECK_THROWS_AS(MHDState(ScalarField(G64), ScalarField(Grid(32, 2 * kPi))), std::invalid_argument);
}

TEST_CASE("derived fields") {
  const auto w = ScalarField::sample(G64, [](double x, double) { return std::cos(x); });
  const DerivedFields d = derive_fields(MHDState(w, ScalarField(G64)));
  CHECK(d.v.x.sup() <= 1e-14);
  CHECK(sup_diff(d.v.y, ScalarField::sample(G64, [](double x, double) { return std::sin(x); })) <= 1e-13);
  CHECK(d.b.sup() == 0.0);

  const ScalarField f = smooth_random(G64, 0);
  const DerivedFields e = derive_fields(MHDState(f, f));
  CHECK(sup_diff(e.v.x, e.b.x) == 0.0);
  CHECK(sup_diff(e.v.y, e.b.y) == 0.0);

  const Grid g(128, 2 * kPi);
  const ScalarField chi = mean_projected(indicator(ShapeSpec::disc(g.center(), 0.75), 4 * g.spacing(), g));
  const DerivedFields p = derive_fields(MHDState(chi, ScalarField(g)));
  CHECK(divergence(p.v).sup() <= 1e-12);
  // d1 v1 + d2 v2 == 0 from the stream function.
  CHECK((p.grad_v[0].values + p.grad_v[3].values).abs().maxCoeff() == 0.0);
}

TEST_CASE("bilinear source") {
  const VectorField v = biot_savart(smooth_random(G64, 0));
  const VectorField b = biot_savart(smooth_random(G64, 1));
  const DerivedFields d = derive_fields(MHDState(smooth_random(G64, 0), smooth_random(G64, 1)));
  CHECK(source_h(v, v).sup() <= 1e-13 * std::max(1.0, std::pow(v.sup(), 2)));
  CHECK(source_h(v, VectorField(G64)).sup() == 0.0);
  // The evolution source carries the factor 2 of the bilinear form.
  CHECK(sup_diff(source_h(v, b), 2.0 * bilinear_h(d.grad_v, d.grad_b)) <= 1e-12);

  // Radial v and b commute: the source vanishes up to discretization.
  const Grid g(256, 2 * kPi);
  const VectorField rv = swirl(g, gauss_a), rb = swirl(g, gauss_b);
  CHECK(source_h(rv, rb).sup() <= 1e-6);
}

TEST_CASE("right-hand side") {
  const ScalarField f = smooth_random(G64, 0), h = smooth_random(G64, 1);
  const auto [a, b] = rhs(MHDState(f, f));
  CHECK(a.sup() <= 1e-12);
  CHECK(b.sup() <= 1e-12);

  // Pure Euler transport.
  const auto [ew, ej] = rhs(MHDState(f, ScalarField(G64)));
  const VectorField v = biot_savart(f);
  const VectorField gw = gradient(f);
  const ScalarField adv = product(v.x, gw.x) + product(v.y, gw.y);
  CHECK(sup_diff(ew, -1.0 * adv) <= 1e-12);
  CHECK(ej.sup() == 0.0);

  // Single modes, closed form: (0, 2 sin x1 sin x2).
  const auto c1 = ScalarField::sample(G64, [](double x, double) { return std::cos(x); });
  const auto c2 = ScalarField::sample(G64, [](double, double y) { return std::cos(y); });
  const auto [sw, sj] = rhs(MHDState(c1, c2));
  CHECK(sw.sup() <= 1e-13);
  CHECK(sup_diff(sj, ScalarField::sample(G64, [](double x, double y) { return 2 * std::sin(x) * std::sin(y); })) <= 1e-13);

  // Quadratic scaling and zero mean.
  const auto [r1w, r1j] = rhs(MHDState(f, h));
  for (double alpha : {0.5, 2.0}) {
    const auto [rw, rj] = rhs(MHDState(alpha * f, alpha * h));
    CHECK(sup_diff(rw, alpha * alpha * r1w) <= 1e-12 * alpha * alpha * std::max(1.0, r1w.sup()));
    CHECK(sup_diff(rj, alpha * alpha * r1j) <= 1e-12 * alpha * alpha * std::max(1.0, r1j.sup()));
  }
  CHECK(std::abs(r1w.mean()) <= 1e-13);
  CHECK(std::abs(r1j.mean()) <= 1e-13);
}

TEST_CASE("elsasser variables") {
  const ScalarField f = smooth_random(G64, 0), g = smooth_random(G64, 1);
  const ElsasserPair p = elsasser_forward(f, g);
  const auto [f2, g2] = elsasser_inverse(p);
  CHECK(sup_diff(f, f2) <= 1e-15);
  CHECK(sup_diff(g, g2) <= 1e-15);
  CHECK(elsasser_forward(f, f).psi.sup() == 0.0);
  CHECK(elsasser_forward(f, -1.0 * f).phi.sup() == 0.0);

  // The Elsasser right-hand side is the primitive one, rotated.
  const auto [rw, rj] = rhs(MHDState(f, g));
  const ElsasserPair rz = elsasser_rhs(p);
  CHECK(sup_diff(rz.phi, rw + rj) <= 1e-12);
  CHECK(sup_diff(rz.psi, rw - rj) <= 1e-12);
}

TEST_CASE("co-normal derivative") {
  const VectorField X = perp_gradient(smooth_random(G64, 2, 2, 4.0));
  const ScalarField f = smooth_random(G64, 3);
  CHECK(sup_diff(conormal(X, f), directional(X, f)) <= 1e-8);
  CHECK(conormal(X, ScalarField::constant(G64, 2.0)).sup() <= 1e-13);

  const Grid g(256, 2 * kPi);
  const Point c = g.center();
  auto radial = [&](double (*prof)(double)) {
    return ScalarField::sample(g, [&](double x, double y) { return prof(std::hypot(x - c.x(), y - c.y())); });
  };
  const VectorField Xr = perp_gradient(radial(gauss_a));
  CHECK(conormal(Xr, radial(gauss_b)).sup() <= 1e-6);
}

TEST_CASE("identity residuals") {
  const auto phi = ScalarField::sample(G64, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const VectorField X = perp_gradient(phi);
  const auto w = ScalarField::sample(G64, [](double x, double y) { return std::cos(x) * std::cos(2 * y); });
  const auto j = ScalarField::sample(G64, [](double x, double y) { return std::sin(2 * x + y); });
  const IdentityResiduals r = identity_residuals(X, MHDState(w, j), 0.1);
  CHECK(r.points > 0);
  CHECK(r.yasser <= 1e-8);
  CHECK(r.iden1 <= 1e-8);

  const ScalarField f = smooth_random(G64, 0);
  const IdentityResiduals eq = identity_residuals(X, MHDState(f, f), 0.1);
  CHECK(eq.iden1 <= 1e-10);

  CHECK_THROWS_AS(identity_residuals(VectorField(G64), MHDState(w, j), 0.1), EmptyEvaluationSet);

  // Gradient bound through X and its co-normal derivative.
  const double c = gradient_bound_constant(X, MHDState(w, j), 0.1);
  CHECK(c > 0.0);
  CHECK(c <= 4.0);
}
