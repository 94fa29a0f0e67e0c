#include "mhdlab/evolution.hpp"

#include "mhdlab/util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mhd {
namespace {

ScalarField truncate(const ScalarField& f) { return inverse(dealias(forward(f))); }

ScalarField axpy(const ScalarField& y, double a, const ScalarField& k) {
  return ScalarField(y.grid, y.values + a * k.values);
}

VectorField axpy(const VectorField& y, double a, const VectorField& k) {
  return {axpy(y.x, a, k.x), axpy(y.y, a, k.y), y.divergence_free};
}

struct TracerRates {
  std::vector<ScalarField> scalars;
  std::vector<VectorField> vectors;
  std::vector<Point> markers;
};

TracerRates tracer_rates(const Tracers& tr, const VectorField& v) {
  TracerRates out;
  for (const ScalarField& s : tr.scalars) {
    const ScalarField st = truncate(s);
    Spectrum d = derivative(forward(product(v.x, st)), 1);
    d.coeffs += derivative(forward(product(v.y, st)), 2).coeffs;
    d.coeffs = -d.coeffs;
    out.scalars.push_back(inverse(dealias(std::move(d))));
  }
  for (const VectorField& X : tr.vectors) {
    // For divergence-free X and v, X . grad v - v . grad X = -perp grad w with
    // w = X2 v1 - X1 v2.
    const ScalarField x1 = truncate(X.x), x2 = truncate(X.y);
    const ScalarField w(v.grid(), x2.values * v.x.values - x1.values * v.y.values);
    const Spectrum wh = dealias(forward(w));
    out.vectors.emplace_back(inverse(derivative(wh, 2)), -1.0 * inverse(derivative(wh, 1)), true);
  }
  if (!tr.markers.empty()) out.markers = sample_velocity(v, tr.markers);
  return out;
}

Tracers tracer_stage(const Tracers& y, double a, const TracerRates& k) {
  Tracers out;
  for (size_t i = 0; i < y.scalars.size(); ++i) out.scalars.push_back(axpy(y.scalars[i], a, k.scalars[i]));
  for (size_t i = 0; i < y.vectors.size(); ++i) out.vectors.push_back(axpy(y.vectors[i], a, k.vectors[i]));
  out.markers.resize(y.markers.size());
  for (size_t i = 0; i < y.markers.size(); ++i) out.markers[i] = y.markers[i] + a * k.markers[i];
  return out;
}

void tracer_combine(Tracers& y, double dt, const TracerRates* k[4]) {
  constexpr double w[4] = {1.0, 2.0, 2.0, 1.0};
  for (size_t i = 0; i < y.scalars.size(); ++i) {
    RealArray acc = k[0]->scalars[i].values;
    for (int s = 1; s < 4; ++s) acc += w[s] * k[s]->scalars[i].values;
    y.scalars[i].values += (dt / 6.0) * acc;
  }
  for (size_t i = 0; i < y.vectors.size(); ++i) {
    RealArray a1 = k[0]->vectors[i].x.values, a2 = k[0]->vectors[i].y.values;
    for (int s = 1; s < 4; ++s) {
      a1 += w[s] * k[s]->vectors[i].x.values;
      a2 += w[s] * k[s]->vectors[i].y.values;
    }
    y.vectors[i].x.values += (dt / 6.0) * a1;
    y.vectors[i].y.values += (dt / 6.0) * a2;
  }
  for (size_t i = 0; i < y.markers.size(); ++i) {
    Point acc = k[0]->markers[i];
    for (int s = 1; s < 4; ++s) acc += w[s] * k[s]->markers[i];
    y.markers[i] += (dt / 6.0) * acc;
  }
}

ScalarField rk4_combine(const ScalarField& y, double dt, const ScalarField& k1, const ScalarField& k2,
                        const ScalarField& k3, const ScalarField& k4) {
  return ScalarField(y.grid, y.values + (dt / 6.0) * (k1.values + 2.0 * k2.values + 2.0 * k3.values + k4.values));
}

MHDState filtered(MHDState s, const SolverConfig& cfg) {
  if (cfg.filter > 0.0) {
    s.omega = exponential_filter(s.omega, cfg.filter);
    s.j = exponential_filter(s.j, cfg.filter);
  }
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be >= 0 and finite");
  if (dt == 0.0 && !(cfl > 0.0 && cfl <= 0.8)) throw std::invalid_argument("cfl must lie in (0, 0.8]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!(filter >= 0.0)) throw std::invalid_argument("filter strength must be >= 0");
}

double max_speed(const MHDState& state) {
  const DerivedFields d = derive_fields(state);
  return (d.v.magnitude() + d.b.magnitude()).maxCoeff();
}

double cfl_dt(const MHDState& state, double cfl) {
  const double speed = max_speed(state);
  return speed > 0.0 ? cfl * state.grid().spacing() / speed : std::numeric_limits<double>::infinity();
}

VectorField transport_velocity(const ScalarField& omega) {
  Spectrum w = dealias(forward(omega));
  w.zero_mean();
  const Spectrum psi = inverse_laplacian(std::move(w));
  return {-1.0 * inverse(derivative(psi, 2)), inverse(derivative(psi, 1)), true};
}

double bilinear(const ScalarField& f, const Point& x) {
  const int n = f.grid.n();
  const double h = f.grid.spacing();
  const double u = wrap_coordinate(x.x(), f.grid.length()) / h;
  const double w = wrap_coordinate(x.y(), f.grid.length()) / h;
  const int c0 = static_cast<int>(std::floor(u)) % n, r0 = static_cast<int>(std::floor(w)) % n;
  const int c1 = (c0 + 1) % n, r1 = (r0 + 1) % n;
  const double fu = u - std::floor(u), fw = w - std::floor(w);
  const RealArray& a = f.values;
  return (1 - fw) * ((1 - fu) * a(r0, c0) + fu * a(r0, c1)) + fw * ((1 - fu) * a(r1, c0) + fu * a(r1, c1));
}

std::vector<Point> sample_velocity(const VectorField& v, const std::vector<Point>& xs) {
  std::vector<Point> out(xs.size());
  if (xs.size() <= kSpectralMarkerLimit) {
    const PointEvaluator e1(forward(v.x)), e2(forward(v.y));
    const std::vector<double> a = e1.values(xs), b = e2.values(xs);
    for (size_t i = 0; i < xs.size(); ++i) out[i] = Point(a[i], b[i]);
  } else {
    for (size_t i = 0; i < xs.size(); ++i) out[i] = Point(bilinear(v.x, xs[i]), bilinear(v.y, xs[i]));
  }
  return out;
}

MHDState step(const MHDState& s, double dt, const SolverConfig& cfg, Tracers* tracers) {
  const bool carry = tracers != nullptr && !tracers->empty();
  auto stage = [&](const MHDState& y, const Tracers* ty, TracerRates* kt) {
    if (carry) *kt = tracer_rates(*ty, transport_velocity(y.omega));
    return rhs(y);
  };
  TracerRates t1, t2, t3, t4;
  const auto k1 = stage(s, tracers, &t1);
  Tracers y2 = carry ? tracer_stage(*tracers, 0.5 * dt, t1) : Tracers{};
  const MHDState s2(axpy(s.omega, 0.5 * dt, k1.first), axpy(s.j, 0.5 * dt, k1.second));
  const auto k2 = stage(s2, &y2, &t2);
  Tracers y3 = carry ? tracer_stage(*tracers, 0.5 * dt, t2) : Tracers{};
  const MHDState s3(axpy(s.omega, 0.5 * dt, k2.first), axpy(s.j, 0.5 * dt, k2.second));
  const auto k3 = stage(s3, &y3, &t3);
  Tracers y4 = carry ? tracer_stage(*tracers, dt, t3) : Tracers{};
  const MHDState s4(axpy(s.omega, dt, k3.first), axpy(s.j, dt, k3.second));
  const auto k4 = stage(s4, &y4, &t4);
  if (carry) {
    const TracerRates* ks[4] = {&t1, &t2, &t3, &t4};
    tracer_combine(*tracers, dt, ks);
  }
  MHDState out(rk4_combine(s.omega, dt, k1.first, k2.first, k3.first, k4.first),
               rk4_combine(s.j, dt, k1.second, k2.second, k3.second, k4.second), s.time + dt);
  return filtered(std::move(out), cfg);
}

MHDState step_elsasser(const MHDState& s, double dt, const SolverConfig& cfg) {
  const ElsasserPair z = elsasser_forward(s.omega, s.j);
  auto shift = [](const ElsasserPair& y, double a, const ElsasserPair& k) {
    return ElsasserPair{axpy(y.phi, a, k.phi), axpy(y.psi, a, k.psi)};
  };
  const ElsasserPair k1 = elsasser_rhs(z);
  const ElsasserPair k2 = elsasser_rhs(shift(z, 0.5 * dt, k1));
  const ElsasserPair k3 = elsasser_rhs(shift(z, 0.5 * dt, k2));
  const ElsasserPair k4 = elsasser_rhs(shift(z, dt, k3));
  const ElsasserPair next{rk4_combine(z.phi, dt, k1.phi, k2.phi, k3.phi, k4.phi),
                          rk4_combine(z.psi, dt, k1.psi, k2.psi, k3.psi, k4.psi)};
  auto [w, j] = elsasser_inverse(next);
  return filtered(MHDState(std::move(w), std::move(j), s.time + dt), cfg);
}

void advect(Tracers& tracers, const VectorField& velocity, double dt) {
  if (tracers.empty()) return;
  const TracerRates k1 = tracer_rates(tracers, velocity);
  const TracerRates k2 = tracer_rates(tracer_stage(tracers, 0.5 * dt, k1), velocity);
  const TracerRates k3 = tracer_rates(tracer_stage(tracers, 0.5 * dt, k2), velocity);
  const TracerRates k4 = tracer_rates(tracer_stage(tracers, dt, k3), velocity);
  const TracerRates* ks[4] = {&k1, &k2, &k3, &k4};
  tracer_combine(tracers, dt, ks);
}

Simulation::Simulation(MHDState initial, SolverConfig cfg) : state_(std::move(initial)), cfg_(cfg) {
  cfg_.validate();
}

double Simulation::next_dt() const {
  if (cfg_.dt > 0.0) {
    if (cfg_.strict_cfl) {
      const double speed = max_speed(state_);
      const double courant = cfg_.dt * speed / state_.grid().spacing();
      if (courant > 0.8) {
        std::ostringstream os;
        os << "fixed dt " << cfg_.dt << " gives Courant number " << courant << " > 0.8 at step "
           << steps_ + 1;
        throw CflViolation(os.str());
      }
    }
    return cfg_.dt;
  }
  return cfl_dt(state_, cfg_.cfl);
}

bool Simulation::done() const {
  return cfg_.t_end - state_.time <= 1e-12 * std::max(1.0, cfg_.t_end);
}

double Simulation::advance() {
  const double dt = std::min(next_dt(), cfg_.t_end - state_.time);
  const long index = steps_ + 1;
  if (cfg_.scheme == Scheme::elsasser && !tracers_.empty()) {
    throw std::invalid_argument("tracers are only carried by the primitive scheme");
  }
  try {
    MHDState next = cfg_.scheme == Scheme::primitive ? step(state_, dt, cfg_, &tracers_)
                                                     : step_elsasser(state_, dt, cfg_);
    if (!next.omega.finite() || !next.j.finite()) throw std::domain_error("non-finite field");
    if (keep_history_) history_.push_back({state_, dt});
    state_ = std::move(next);
  } catch (const std::domain_error&) {
    std::ostringstream os;
    os << "non-finite values at step " << index << " (t = " << state_.time << ", dt = " << dt << ")";
    throw NaNAbort(index, os.str());
  }
  ++steps_;
  return dt;
}

void Simulation::run(const std::function<void(const Simulation&)>& on_step) {
  while (!done()) {
    advance();
    if (on_step) on_step(*this);
  }
}

std::vector<Point> Simulation::wrapped_markers() const {
  const double L = state_.grid().length();
  std::vector<Point> out;
  out.reserve(tracers_.markers.size());
  for (const Point& p : tracers_.markers) out.emplace_back(wrap_coordinate(p.x(), L), wrap_coordinate(p.y(), L));
  return out;
}

Pushforward pushforward(const VectorField& X0, const std::vector<HistoryEntry>& history) {
  for (const HistoryEntry& e : history) {
    if (!(e.state.grid() == X0.grid())) throw std::invalid_argument("history and field live on different grids");
  }
  Tracers tr;
  tr.vectors.push_back(X0);
  tr.scalars.push_back(inverse_laplacian(curl(X0)));
  SolverConfig plain;
  for (const HistoryEntry& e : history) step(e.state, e.dt, plain, &tr);
  return {tr.vectors[0], perp_gradient(tr.scalars[0])};
}

namespace {

double set_distance(double theta, const std::vector<Interval>& set) {
  double d = std::numeric_limits<double>::infinity();
  for (const Interval& iv : set) d = std::min(d, std::max({iv.lo - theta, 0.0, theta - iv.hi}));
  return d;
}

void check_sets(const std::vector<Interval>& A, const std::vector<Interval>& B) {
  if (A.empty() || B.empty()) throw std::invalid_argument("cut-off value sets must be non-empty");
  for (const auto* set : {&A, &B}) {
    for (const Interval& iv : *set) {
      if (!(iv.lo <= iv.hi)) throw std::invalid_argument("interval with lo > hi");
    }
  }
  for (const Interval& a : A) {
    for (const Interval& b : B) {
      if (a.lo <= b.hi && b.lo <= a.hi) throw std::invalid_argument("cut-off value sets must be disjoint");
    }
  }
}

}  // namespace

double cutoff_profile(double theta, const std::vector<Interval>& A, const std::vector<Interval>& B) {
  const double da = set_distance(theta, A), db = set_distance(theta, B);
  return da / (da + db);
}

ScalarField build_cutoff(const ScalarField& phi, const std::vector<Interval>& A,
                         const std::vector<Interval>& B) {
  check_sets(A, B);
  return ScalarField(phi.grid, phi.values.unaryExpr([&](double t) { return cutoff_profile(t, A, B); }));
}

double polygon_area(const std::vector<Point>& pts) {
  double s = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % pts.size()];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

}  // namespace mhd
