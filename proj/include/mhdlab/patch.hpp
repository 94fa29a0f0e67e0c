#pragma once

#include "mhdlab/fields.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mhd {

enum class ShapeKind { disc, ellipse, star };

/// Simply connected smooth domain: a disc, an axis-aligned ellipse or a polar
/// star r(theta) = r0 (1 + sum eps_k cos k theta).
struct ShapeSpec {
  ShapeKind kind = ShapeKind::disc;
  Point center = Point::Zero();
  double r = 1.0;             // disc radius
  double a = 1.0, b = 1.0;    // ellipse semi-axes
  double r0 = 1.0;            // star mean radius
  std::vector<std::pair<int, double>> modes;  // star (k, eps_k)

  static ShapeSpec disc(const Point& c, double radius);
  static ShapeSpec ellipse(const Point& c, double semi_a, double semi_b);
  static ShapeSpec star(const Point& c, double mean_radius, std::vector<std::pair<int, double>> modes);

  /// Throws std::invalid_argument on non-positive sizes or a star radius that
  /// gets too close to zero.
  void validate() const;
  /// validate() plus containment in the central half of the box.
  void validate_in(const Grid& g) const;

  /// Boundary point and outward unit normal at parameter theta.
  Point boundary(double theta) const;
  Point normal(double theta) const;
  /// Signed distance to the boundary, negative inside.
  double signed_distance(const Point& x) const;
  /// Parameter of the boundary point nearest to x.
  double nearest_parameter(const Point& x) const;
  /// Signed curvature at theta (positive where the shape is convex).
  double curvature(double theta) const;
  /// Unit tangent (counter-clockwise) at theta.
  Point tangent(double theta) const;
  /// d boundary / d theta.
  Point boundary_derivative(double theta) const;
  bool contains(const Point& x) const;
  /// Smooth defining function: > 1 inside, == 1 on the boundary.
  double level(const Point& x) const;
  /// Length scale used by the Hamiltonian cut-off.
  double scale() const;
  double area() const;
  /// Largest distance from the center to the boundary.
  double outer_radius() const;

  std::string describe() const;
};

std::vector<Point> boundary_markers(const ShapeSpec& s, int count);

/// Quintic smoothstep on [0, 1], clamped.
double smoothstep5(double u);

/// Mollified characteristic function: 1 at depth >= h, 0 at distance >= h.
ScalarField indicator(const ShapeSpec& shape, double h, const Grid& grid);

struct Hamiltonian {
  ScalarField phi0;
  VectorField b0;
  double lambda = 1.0;
};

/// phi0 = chi * f with f the shape's level function and chi a smooth plateau
/// cut-off equal to 1 on a neighbourhood of the shape; b0 = perp grad phi0.
Hamiltonian level_set_hamiltonian(const ShapeSpec& shape, double h, const Grid& grid);

class NonDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Equiv1 {
  double eta = 0.0;
  double delta = 0.0;
  std::vector<std::pair<double, double>> ladder;  // (eta, delta) per rung
};

/// Grid scan of |phi0 - lambda| < eta  =>  |b0| > delta over the ladder
/// eta in {0.05, 0.1, 0.2} * range(phi0). Delta counts as positive above
/// 1e-8 * max|b0|. Throws NonDegeneracyError when no rung qualifies.
Equiv1 check_equiv1(const ScalarField& phi0, const VectorField& b0, double lambda);
/// Same scan for one eta.
double equiv1_delta(const ScalarField& phi0, const VectorField& b0, double lambda, double eta);

/// b0 = G'(phi0) perp grad phi0. Throws when |G'| gets within 1e-8 of zero
/// on the range of phi0.
VectorField commuting_pair(const ScalarField& phi0, const std::function<double(double)>& gprime);

/// [X, Y] = dX Y - dY X (spectral gradients, pointwise products).
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

/// max |b . n| over the analytic boundary at `count` equispaced parameters.
double boundary_tangency(const VectorField& b, const ShapeSpec& shape, int count = 512);
/// max |b . n| over a closed marker polyline; normals come from spectral
/// differentiation of the periodic marker sequence.
double contour_tangency(const VectorField& b, const std::vector<Point>& markers);
/// Outward normals of a counter-clockwise closed marker sequence.
std::vector<Point> contour_normals(const std::vector<Point>& markers);

struct RankineValue {
  double stream = 0.0;
  Point velocity = Point::Zero();
};

/// Rankine vortex of radius r centred at the origin, stream with
/// Laplacian = indicator (inside: |x|^2/4 - (r^2/2)(log(1/r) + 1/2)).
RankineValue rankine(double r, const Point& x);

/// omega = indicator(disc r), j = indicator(disc R), common centre.
MHDState concentric_state(double r, double R, const Grid& grid, double h, const Point& center);
MHDState concentric_state(double r, double R, const Grid& grid, double h);

class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vortex patch with a tangential magnetic field.
struct PatchData {
  ShapeSpec shape;
  ScalarField omega0;
  ScalarField j0;
  ScalarField phi0;
  VectorField b0;
  double lambda = 1.0;
  double eta = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double tangency = 0.0;     // max |b0 . n| on 512 boundary markers
  bool admissible = false;
  std::string reason;        // why admissibility failed, if it did

  /// Mean-free state (the indicator's mean does not affect the dynamics).
  MHDState state() const { return MHDState(mean_projected(omega0), mean_projected(j0)); }
};

/// Builds the patch and checks tangency <= 1e-5 max|b0| and the
/// non-degeneracy scan. With enforce, failures throw AdmissibilityError;
/// otherwise they are recorded in `admissible`/`reason`.
PatchData make_patch(const ShapeSpec& shape, double h, const Grid& grid, bool enforce = true);

}  // namespace mhd
