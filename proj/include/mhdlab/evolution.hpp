#pragma once

#include "mhdlab/fields.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhd {

enum class Scheme { primitive, elsasser };

struct SolverConfig {
  double dt = 0.0;     // fixed step; 0 selects the CFL rule
  double cfl = 0.5;    // dt = cfl * spacing / max(|v| + |b|), must be <= 0.8
  double t_end = 1.0;
  Scheme scheme = Scheme::primitive;
  double filter = 0.0;  // exponential filter strength, 0 = off
  bool strict_cfl = false;  // also check fixed steps against the 0.8 limit

  void validate() const;
};

class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NaNAbort : public std::runtime_error {
 public:
  NaNAbort(long step, const std::string& what) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// max over the grid of |v| + |b|.
double max_speed(const MHDState& state);
double cfl_dt(const MHDState& state, double cfl);

/// Velocity of the two-thirds truncated vorticity (what the right-hand side
/// actually transports with).
VectorField transport_velocity(const ScalarField& omega);

/// Passive quantities carried along with the flow. Scalars obey
/// d_t s + div(v s) = 0; vectors are divergence-free fields pushed forward by
/// the flow, d_t X + v . grad X = X . grad v; markers follow dx/dt = v(x).
/// Every RK4 stage uses that stage's velocity.
struct Tracers {
  std::vector<ScalarField> scalars;
  std::vector<VectorField> vectors;
  std::vector<Point> markers;  // unwrapped positions

  bool empty() const { return scalars.empty() && vectors.empty() && markers.empty(); }
};

/// Marker count up to which velocities are sampled from the Fourier series;
/// above it bilinear interpolation of grid values is used.
inline constexpr size_t kSpectralMarkerLimit = 4096;

/// Samples a velocity field at arbitrary points (spectral or bilinear, per
/// kSpectralMarkerLimit).
std::vector<Point> sample_velocity(const VectorField& v, const std::vector<Point>& xs);
/// Bilinear periodic interpolation of grid values.
double bilinear(const ScalarField& f, const Point& x);

/// One classical RK4 step of size dt; the optional filter is applied once
/// at the end. Tracers, if given, are advanced with the same stages.
MHDState step(const MHDState& state, double dt, const SolverConfig& cfg, Tracers* tracers = nullptr);
/// RK4 on (omega + j, omega - j) with elsasser_rhs, mapped back.
MHDState step_elsasser(const MHDState& state, double dt, const SolverConfig& cfg);

/// RK4 step of tracers in a prescribed steady velocity field.
void advect(Tracers& tracers, const VectorField& velocity, double dt);

struct HistoryEntry {
  MHDState state;  // state at the start of the step
  double dt;
};

/// Drives a run: step selection, NaN detection, tracer payload, history.
class Simulation {
 public:
  Simulation(MHDState initial, SolverConfig cfg);

  Tracers& tracers() { return tracers_; }
  const Tracers& tracers() const { return tracers_; }
  void keep_history(bool on) { keep_history_ = on; }
  const std::vector<HistoryEntry>& history() const { return history_; }

  const MHDState& state() const { return state_; }
  const SolverConfig& config() const { return cfg_; }
  long steps() const { return steps_; }
  double time() const { return state_.time; }

  /// Step size the next advance would use (before clipping to t_end).
  double next_dt() const;
  /// One step, clipped so that it does not pass t_end. Returns dt.
  double advance();
  /// Advances until t_end, invoking on_step after every step.
  void run(const std::function<void(const Simulation&)>& on_step = {});
  bool done() const;

  /// Marker positions wrapped into the periodic box.
  std::vector<Point> wrapped_markers() const;

 private:
  MHDState state_;
  SolverConfig cfg_;
  Tracers tracers_;
  std::vector<HistoryEntry> history_;
  bool keep_history_ = false;
  long steps_ = 0;
};

struct Pushforward {
  VectorField direct;       // integrates d_t X + v . grad X = X . grad v
  VectorField from_stream;  // perp grad of the transported stream function
};

/// Replays a recorded run on the Hamiltonian field X0 both ways.
Pushforward pushforward(const VectorField& X0, const std::vector<HistoryEntry>& history);

struct Interval {
  double lo, hi;
};

/// dist(theta, A) / (dist(theta, A) + dist(theta, B)) for disjoint closed
/// interval unions A and B.
double cutoff_profile(double theta, const std::vector<Interval>& A, const std::vector<Interval>& B);
/// cutoff_profile composed with phi pointwise.
ScalarField build_cutoff(const ScalarField& phi, const std::vector<Interval>& A,
                         const std::vector<Interval>& B);

/// Shoelace area of a closed polygon.
double polygon_area(const std::vector<Point>& pts);

}  // namespace mhd
