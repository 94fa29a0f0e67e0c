#pragma once

#include "mhdlab/patch.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhd {

// Free-space potential theory for patches in the plane (no periodicity).
//
// Two sign conventions are in play:
//   Newtonian potential  phi_N(x) = (1/2pi) int log(1/|x-y|) dy,  Lap phi_N = -indicator
//   Rankine stream       phi_0    = -phi_N,                        Lap phi_0 = +indicator
// Velocities are v = perp grad phi_0 in both routes.

class QuadratureDepthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double accuracy = 1e-5;      // target absolute accuracy of phi_N (>= 1e-6)
  bool curvature_correction = true;
  int max_depth = 48;          // cap on the x-dependent subdivision
};

/// Immutable adaptive quad-tree over a shape. Interior cells use tensor
/// Gauss rules; leaves cut by the boundary use the boundary's local
/// quadratic model (tangent line plus curvature sliver). Cells near the
/// evaluation point are refined on the fly; the innermost one is replaced by
/// an equal-area disc centred at x with the analytic log integral.
class QuadratureDomain {
 public:
  explicit QuadratureDomain(ShapeSpec shape, QuadratureOptions opts = {});

  const ShapeSpec& shape() const { return shape_; }
  const QuadratureOptions& options() const { return opts_; }
  double accuracy() const { return opts_.accuracy; }

  /// Sum of interior cell areas plus cut-cell estimates.
  double area_estimate() const;
  size_t leaf_count() const { return leaves_; }

  /// (phi_N, v1, v2) at x.
  Eigen::Vector3d integrate(const Point& x) const;

 private:
  struct Node {
    Point lo;
    double size = 0.0;
    enum Kind { inside, boundary, parent } kind = inside;
    int child = -1;  // first of four children when kind == parent
    // Local boundary model for boundary leaves.
    Point foot = Point::Zero();
    Point normal = Point::Zero();
    Point tangent = Point::Zero();
    double kappa = 0.0;
  };

  Node make(const Point& lo, double size);

  ShapeSpec shape_;
  QuadratureOptions opts_;
  std::vector<Node> nodes_;
  double leaf_size_ = 0.0;
  double min_size_ = 0.0;
  size_t leaves_ = 0;
};

/// (1/2pi) int_Omega log(1/|x - y|) dy.
double newtonian_potential(const QuadratureDomain& dom, const Point& x);
/// perp grad of the Rankine-sign stream -phi_N.
Point freespace_velocity(const QuadratureDomain& dom, const Point& x);

struct BoundaryConstancy {
  double mean = 0.0;
  double stddev = 0.0;
  int samples = 0;
};

/// phi_N sampled at `samples` equispaced boundary parameters.
BoundaryConstancy boundary_constancy(const QuadratureDomain& dom, int samples = 256);

/// Boundary-integral route, periodic trapezoid rule in the shape parameter:
///   v(x)     = -(1/2pi) oint log|x - y| dy
///   phi_0(x) =  (1/2pi) oint (y - x) . n (log|y - x| / 2 - 1/4) ds
/// Accurate away from the boundary (several node spacings).
class ContourQuadrature {
 public:
  ContourQuadrature(const ShapeSpec& shape, int nodes = 2048);

  Point velocity(const Point& x) const;
  /// Rankine-sign stream phi_0 (= -phi_N).
  double stream(const Point& x) const;
  /// Central-difference velocity gradient (d1 v1, d2 v1, d1 v2, d2 v2).
  Eigen::Vector4d velocity_gradient(const Point& x, double step) const;
  double node_spacing() const { return spacing_; }

 private:
  std::vector<Point> y_;
  std::vector<Point> dy_;  // dy/dtheta * dtheta
  double spacing_ = 0.0;
};

enum class StationaryCase { euler_disc, mhd_concentric, mhd_equal, mhd_offset };

StationaryCase parse_stationary_case(const std::string& name);
std::string to_string(StationaryCase c);

struct VerdictRequest {
  StationaryCase kind = StationaryCase::euler_disc;
  double r = 0.5;   // vortex patch radius
  double R = 0.8;   // current patch radius (concentric case)
  double d = 0.4;   // centre separation (offset case, equal radii r)
  std::optional<ShapeSpec> shape;  // equal case (defaults to disc r)
  double accuracy = 1e-5;
  int samples = 256;   // boundary samples per boundary
  int eval_n = 48;     // evaluation grid per axis
};

struct SourceSample {
  Point x;
  double source;  // 2 H(v, b)
};

struct VerdictReport {
  std::string case_name;
  double sheet = 0.0;      // RMS normal-flux sheet strength / max(|v| + |b|)
  double source = 0.0;     // RMS 2H(v, b) off the boundaries / max |grad v||grad b|
  double residual = 0.0;   // max of the two
  double euler_reference = 0.0;
  double floor = 0.0;
  double threshold = 0.0;  // 3 * max(euler_reference, floor)
  bool stationary = false;
  std::vector<SourceSample> map;
};

/// Evaluates both components of the right-hand side for sharp patches
/// omega = indicator(Omega), j = indicator(D): the jump terms concentrate on
/// the boundaries as normal-flux sheets, the bilinear source lives in the
/// bulk. Rejects tangent boundaries.
VerdictReport stationarity_verdict(const VerdictRequest& req);

/// The floor below which residuals are quadrature noise.
double stationarity_floor(double accuracy);

}  // namespace mhd
