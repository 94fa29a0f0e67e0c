#include "mhdlab/patch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace mhd {
namespace {

constexpr double kPi = std::numbers::pi;

struct CurvePoint {
  Point p;
  Point d1;
  Point d2;
};

// Star radius and its first two theta-derivatives.
struct PolarRadius {
  double r, dr, ddr;
};

PolarRadius star_radius(const ShapeSpec& s, double theta) {
  double r = 1.0, dr = 0.0, ddr = 0.0;
  for (const auto& [k, eps] : s.modes) {
    r += eps * std::cos(k * theta);
    dr -= eps * k * std::sin(k * theta);
    ddr -= eps * k * k * std::cos(k * theta);
  }
  return {s.r0 * r, s.r0 * dr, s.r0 * ddr};
}

CurvePoint curve(const ShapeSpec& s, double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  switch (s.kind) {
    case ShapeKind::disc:
      return {s.center + s.r * Point(c, sn), s.r * Point(-sn, c), s.r * Point(-c, -sn)};
    case ShapeKind::ellipse:
      return {s.center + Point(s.a * c, s.b * sn), Point(-s.a * sn, s.b * c),
              Point(-s.a * c, -s.b * sn)};
    case ShapeKind::star: {
      const PolarRadius pr = star_radius(s, theta);
      const Point e(c, sn), t(-sn, c);
      return {s.center + pr.r * e, pr.dr * e + pr.r * t, pr.ddr * e + 2.0 * pr.dr * t - pr.r * e};
    }
  }
  throw std::logic_error("unknown shape kind");
}

bool inside(const ShapeSpec& s, const Point& x) {
  const Point d = x - s.center;
  switch (s.kind) {
    case ShapeKind::disc:
      return d.norm() < s.r;
    case ShapeKind::ellipse:
      return (d.x() / s.a) * (d.x() / s.a) + (d.y() / s.b) * (d.y() / s.b) < 1.0;
    case ShapeKind::star:
      return d.norm() < star_radius(s, std::atan2(d.y(), d.x())).r;
  }
  return false;
}

// Nearest boundary parameter: coarse scan then Newton on (p - x) . p' = 0.
double nearest_theta(const ShapeSpec& s, const Point& x) {
  constexpr int kScan = 96;
  double best_theta = 0.0, best = INFINITY;
  for (int i = 0; i < kScan; ++i) {
    const double th = 2.0 * kPi * i / kScan;
    const double d = (curve(s, th).p - x).squaredNorm();
    if (d < best) {
      best = d;
      best_theta = th;
    }
  }
  double th = best_theta;
  const double step_cap = 2.0 * kPi / kScan;
  for (int it = 0; it < 20; ++it) {
    const CurvePoint cp = curve(s, th);
    const Point diff = cp.p - x;
    const double g = diff.dot(cp.d1);
    const double gp = cp.d1.squaredNorm() + diff.dot(cp.d2);
    if (gp <= 0.0) break;
    const double step = std::clamp(g / gp, -step_cap, step_cap);
    th -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return (curve(s, th).p - x).squaredNorm() <= best ? th : best_theta;
}

}  // namespace

ShapeSpec ShapeSpec::disc(const Point& c, double radius) {
  ShapeSpec s;
  s.kind = ShapeKind::disc;
  s.center = c;
  s.r = radius;
  s.validate();
  return s;
}

ShapeSpec ShapeSpec::ellipse(const Point& c, double semi_a, double semi_b) {
  ShapeSpec s;
  s.kind = ShapeKind::ellipse;
  s.center = c;
  s.a = semi_a;
  s.b = semi_b;
  s.validate();
  return s;
}

ShapeSpec ShapeSpec::star(const Point& c, double mean_radius,
                          std::vector<std::pair<int, double>> modes) {
  ShapeSpec s;
  s.kind = ShapeKind::star;
  s.center = c;
  s.r0 = mean_radius;
  s.modes = std::move(modes);
  s.validate();
  return s;
}

void ShapeSpec::validate() const {
  switch (kind) {
    case ShapeKind::disc:
      if (!(r > 0.0)) throw std::invalid_argument("disc radius must be positive");
      break;
    case ShapeKind::ellipse:
      if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
      break;
    case ShapeKind::star: {
      if (!(r0 > 0.0)) throw std::invalid_argument("star radius must be positive");
      double total = 0.0;
      for (const auto& [k, eps] : modes) {
        if (k < 1) throw std::invalid_argument("star modes must have k >= 1");
        total += std::abs(eps);
      }
      // Keeps r(theta) > r0/2, which the level function relies on.
      if (total >= 0.5) throw std::invalid_argument("star perturbation too large");
      break;
    }
  }
  if (!center.allFinite()) throw std::invalid_argument("shape center must be finite");
}

void ShapeSpec::validate_in(const Grid& g) const {
  validate();
  const double L = g.length();
  const double R = outer_radius();
  for (int i = 0; i < 2; ++i) {
    if (center[i] - R < 0.25 * L || center[i] + R > 0.75 * L) {
      throw std::invalid_argument("shape " + describe() + " is not contained in the central half of the box");
    }
  }
}

Point ShapeSpec::boundary(double theta) const { return curve(*this, theta).p; }

Point ShapeSpec::normal(double theta) const {
  const Point t = curve(*this, theta).d1;
  return Point(t.y(), -t.x()).normalized();
}

double ShapeSpec::signed_distance(const Point& x) const {
  double d;
  if (kind == ShapeKind::disc) {
    d = std::abs((x - center).norm() - r);
  } else {
    d = (curve(*this, nearest_theta(*this, x)).p - x).norm();
  }
  return inside(*this, x) ? -d : d;
}

double ShapeSpec::nearest_parameter(const Point& x) const {
  if (kind == ShapeKind::disc) {
    const Point d = x - center;
    return d.squaredNorm() > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;
  }
  return nearest_theta(*this, x);
}

double ShapeSpec::curvature(double theta) const {
  const CurvePoint cp = curve(*this, theta);
  const double cross = cp.d1.x() * cp.d2.y() - cp.d1.y() * cp.d2.x();
  return cross / std::pow(cp.d1.norm(), 3);
}

Point ShapeSpec::tangent(double theta) const { return curve(*this, theta).d1.normalized(); }

Point ShapeSpec::boundary_derivative(double theta) const { return curve(*this, theta).d1; }

bool ShapeSpec::contains(const Point& x) const { return inside(*this, x); }

double ShapeSpec::level(const Point& x) const {
  const Point d = x - center;
  switch (kind) {
    case ShapeKind::disc:
      return 2.0 - d.squaredNorm() / (r * r);
    case ShapeKind::ellipse:
      return 2.0 - (d.x() * d.x() / (a * a) + d.y() * d.y() / (b * b));
    case ShapeKind::star: {
      // Near the centre the angular modulation is blended out so that f stays
      // smooth at the origin; the boundary (r(theta) > r0/2) is untouched.
      const double rho = d.norm();
      const double w = smoothstep5((rho / r0 - 0.2) / 0.25);
      const double R = rho > 0.0 ? star_radius(*this, std::atan2(d.y(), d.x())).r : r0;
      const double Rb = r0 + w * (R - r0);
      return 2.0 - d.squaredNorm() / (Rb * Rb);
    }
  }
  return 0.0;
}

double ShapeSpec::scale() const {
  switch (kind) {
    case ShapeKind::disc:
      return r;
    case ShapeKind::ellipse:
      return std::min(a, b);
    case ShapeKind::star: {
      double m = INFINITY;
      for (int i = 0; i < 720; ++i) m = std::min(m, star_radius(*this, 2.0 * kPi * i / 720).r);
      return m;
    }
  }
  return 0.0;
}

double ShapeSpec::area() const {
  switch (kind) {
    case ShapeKind::disc:
      return kPi * r * r;
    case ShapeKind::ellipse:
      return kPi * a * b;
    case ShapeKind::star: {
      // (1/2) int r^2 = pi r0^2 (1 + sum eps^2 / 2) for distinct k.
      double s = 1.0;
      for (const auto& [k, eps] : modes) s += 0.5 * eps * eps;
      return kPi * r0 * r0 * s;
    }
  }
  return 0.0;
}

double ShapeSpec::outer_radius() const {
  switch (kind) {
    case ShapeKind::disc:
      return r;
    case ShapeKind::ellipse:
      return std::max(a, b);
    case ShapeKind::star: {
      double m = 0.0;
      for (int i = 0; i < 720; ++i) m = std::max(m, star_radius(*this, 2.0 * kPi * i / 720).r);
      return m;
    }
  }
  return 0.0;
}

std::string ShapeSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ShapeKind::disc:
      os << "disc(r=" << r << ")";
      break;
    case ShapeKind::ellipse:
      os << "ellipse(a=" << a << ", b=" << b << ")";
      break;
    case ShapeKind::star:
      os << "star(r0=" << r0;
      for (const auto& [k, eps] : modes) os << ", eps" << k << "=" << eps;
      os << ")";
      break;
  }
  return os.str();
}

std::vector<Point> boundary_markers(const ShapeSpec& s, int count) {
  if (count < 3) throw std::invalid_argument("need at least 3 boundary markers");
  std::vector<Point> pts(count);
  for (int i = 0; i < count; ++i) pts[i] = s.boundary(2.0 * kPi * i / count);
  return pts;
}

double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

ScalarField indicator(const ShapeSpec& shape, double h, const Grid& grid) {
  shape.validate();
  if (!(h >= 2.0 * grid.spacing() * (1.0 - 1e-12))) {
    throw std::invalid_argument("mollification width below two grid spacings");
  }
  const double reach = shape.outer_radius() + h;
  return ScalarField::sample(grid, [&](double x1, double x2) {
    const Point x(x1, x2);
    // Cheap exits away from the ramp.
    const double rho = (x - shape.center).norm();
    if (rho > reach) return 0.0;
    const double sd = shape.signed_distance(x);
    return 1.0 - smoothstep5((sd + h) / (2.0 * h));
  });
}

Hamiltonian level_set_hamiltonian(const ShapeSpec& shape, double h, const Grid& grid) {
  shape.validate();
  const double ell = shape.scale();
  const double sigma = 0.2 * ell;
  const double t_mid = h + 6.0 * sigma;
  // The cut-off runs on the signed distance, which keeps its transition
  // equally wide in every direction (a rescaled level function would squeeze
  // it along the short axis of an ellipse).
  const double reach = t_mid + 7.0 * sigma;
  ScalarField phi = ScalarField::sample(grid, [&](double x1, double x2) {
    const Point x(x1, x2);
    const double f = shape.level(x);
    if (f > 1.0) return f;
    if ((x - shape.center).norm() > shape.outer_radius() + reach) return 0.0;
    const double t = shape.signed_distance(x);
    return 0.5 * std::erfc((t - t_mid) / sigma) * f;
  });
  const int n = grid.n();
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    edge = std::max({edge, std::abs(phi.values(0, i)), std::abs(phi.values(n - 1, i)),
                     std::abs(phi.values(i, 0)), std::abs(phi.values(i, n - 1))});
  }
  if (edge > 1e-12 * phi.sup()) {
    throw std::domain_error("shape " + shape.describe() + " touching cut-off support (box too small)");
  }
  VectorField b = perp_gradient(phi);
  return {std::move(phi), std::move(b), 1.0};
}

double equiv1_delta(const ScalarField& phi0, const VectorField& b0, double lambda, double eta) {
  phi0.check_same(b0.x);
  const RealArray mag = b0.magnitude();
  const auto near = ((phi0.values - lambda).abs() < eta).eval();
  if (near.count() == 0) return INFINITY;
  return near.select(mag, RealArray::Constant(mag.rows(), mag.cols(), INFINITY)).minCoeff();
}

Equiv1 check_equiv1(const ScalarField& phi0, const VectorField& b0, double lambda) {
  const double range = phi0.values.maxCoeff() - phi0.values.minCoeff();
  const double floor = 1e-8 * b0.sup();
  Equiv1 out;
  bool found = false;
  for (double frac : {0.05, 0.1, 0.2}) {
    const double eta = frac * range;
    const double delta = equiv1_delta(phi0, b0, lambda, eta);
    out.ladder.emplace_back(eta, delta);
    if (std::isfinite(delta) && delta > floor) {
      out.eta = eta;
      out.delta = delta;
      found = true;
    }
  }
  if (!found) {
    throw NonDegeneracyError("no eta on the ladder gives |b0| bounded away from 0 near the level set");
  }
  return out;
}

VectorField commuting_pair(const ScalarField& phi0, const std::function<double(double)>& gprime) {
  const double lo = phi0.values.minCoeff(), hi = phi0.values.maxCoeff();
  // Continuous and bounded away from zero means a single sign as well.
  const double first = gprime(lo);
  for (int i = 0; i <= 256; ++i) {
    const double g = gprime(lo + (hi - lo) * i / 256.0);
    if (!std::isfinite(g) || std::abs(g) < 1e-8 || (g > 0.0) != (first > 0.0)) {
      throw std::invalid_argument("G' must be finite and bounded away from zero on the range of phi0");
    }
  }
  VectorField X = perp_gradient(phi0);
  const RealArray gp = phi0.values.unaryExpr([&](double s) { return gprime(s); });
  return {ScalarField(phi0.grid, gp * X.x.values), ScalarField(phi0.grid, gp * X.y.values), false};
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  X.x.check_same(Y.x);
  const Gradient gx = vector_gradient(X);
  const Gradient gy = vector_gradient(Y);
  const RealArray& x1 = X.x.values;
  const RealArray& x2 = X.y.values;
  const RealArray& y1 = Y.x.values;
  const RealArray& y2 = Y.y.values;
  const RealArray c1 = (x1 * gy[0].values + x2 * gy[1].values) - (y1 * gx[0].values + y2 * gx[1].values);
  const RealArray c2 = (x1 * gy[2].values + x2 * gy[3].values) - (y1 * gx[2].values + y2 * gx[3].values);
  return {ScalarField(X.grid(), c1), ScalarField(X.grid(), c2)};
}

double boundary_tangency(const VectorField& b, const ShapeSpec& shape, int count) {
  const PointEvaluator e1(forward(b.x)), e2(forward(b.y));
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double th = 2.0 * kPi * i / count;
    const Point p = shape.boundary(th);
    const Point nrm = shape.normal(th);
    worst = std::max(worst, std::abs(e1.value(p) * nrm.x() + e2.value(p) * nrm.y()));
  }
  return worst;
}

std::vector<Point> contour_normals(const std::vector<Point>& markers) {
  const int m = static_cast<int>(markers.size());
  if (m < 8) throw std::invalid_argument("need at least 8 contour markers");
  // Spectral derivative of the periodic sequence with respect to the index.
  std::vector<std::complex<double>> z(m), zhat(m);
  for (int i = 0; i < m; ++i) z[i] = {markers[i].x(), markers[i].y()};
  std::vector<std::complex<double>> twiddle(m);
  for (int i = 0; i < m; ++i) twiddle[i] = std::polar(1.0, -2.0 * kPi * i / m);
  for (int k = 0; k < m; ++k) {
    std::complex<double> s = 0.0;
    for (int i = 0; i < m; ++i) s += z[i] * twiddle[(static_cast<long>(k) * i) % m];
    zhat[k] = s;
  }
  // Derivative of a complex sequence: treat real and imaginary parts
  // separately, which for a complex DFT means multiplying by i*k with signed k.
  for (int k = 0; k < m; ++k) {
    const int ks = k <= m / 2 ? k : k - m;
    zhat[k] *= (2 * k == m) ? std::complex<double>(0.0) : std::complex<double>(0.0, ks);
  }
  std::vector<Point> normals(m);
  for (int i = 0; i < m; ++i) {
    std::complex<double> s = 0.0;
    for (int k = 0; k < m; ++k) s += zhat[k] * std::conj(twiddle[(static_cast<long>(k) * i) % m]);
    const Point t(s.real(), s.imag());
    normals[i] = Point(t.y(), -t.x()).normalized();
  }
  return normals;
}

double contour_tangency(const VectorField& b, const std::vector<Point>& markers) {
  const std::vector<Point> normals = contour_normals(markers);
  const PointEvaluator e1(forward(b.x)), e2(forward(b.y));
  double worst = 0.0;
  for (size_t i = 0; i < markers.size(); ++i) {
    const Point& p = markers[i];
    worst = std::max(worst, std::abs(e1.value(p) * normals[i].x() + e2.value(p) * normals[i].y()));
  }
  return worst;
}

RankineValue rankine(double r, const Point& x) {
  if (!(r > 0.0)) throw std::invalid_argument("rankine radius must be positive");
  const double rho2 = x.squaredNorm();
  const Point perp(-x.y(), x.x());
  if (rho2 <= r * r) {
    return {0.25 * rho2 - 0.5 * r * r * (std::log(1.0 / r) + 0.5), 0.5 * perp};
  }
  return {0.25 * r * r * std::log(rho2), (0.5 * r * r / rho2) * perp};
}

MHDState concentric_state(double r, double R, const Grid& grid, double h, const Point& center) {
  const ScalarField w = indicator(ShapeSpec::disc(center, r), h, grid);
  const ScalarField j = indicator(ShapeSpec::disc(center, R), h, grid);
  return MHDState(mean_projected(w), mean_projected(j));
}

MHDState concentric_state(double r, double R, const Grid& grid, double h) {
  return concentric_state(r, R, grid, h, grid.center());
}

PatchData make_patch(const ShapeSpec& shape, double h, const Grid& grid, bool enforce) {
  shape.validate_in(grid);
  Hamiltonian ham = level_set_hamiltonian(shape, h, grid);
  PatchData p{shape,
              indicator(shape, h, grid),
              curl(ham.b0),
              std::move(ham.phi0),
              std::move(ham.b0),
              ham.lambda, 0.0, 0.0, h, 0.0, false, {}};
  p.tangency = boundary_tangency(p.b0, shape, 512);
  const double bmax = p.b0.sup();
  p.admissible = true;
  if (!(p.tangency <= 1e-5 * bmax)) {
    p.admissible = false;
    std::ostringstream os;
    os << "boundary tangency " << p.tangency << " exceeds 1e-5 * max|b0| = " << 1e-5 * bmax;
    p.reason = os.str();
  }
  try {
    const Equiv1 e = check_equiv1(p.phi0, p.b0, p.lambda);
    p.eta = e.eta;
    p.delta = e.delta;
  } catch (const NonDegeneracyError& err) {
    p.admissible = false;
    p.reason += (p.reason.empty() ? "" : "; ") + std::string(err.what());
  }
  if (enforce && !p.admissible) throw AdmissibilityError(p.reason);
  return p;
}

}  // namespace mhd
