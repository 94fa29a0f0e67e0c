#include "mhdlab/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mhd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 0.5 / std::numbers::pi;

// 6-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 6> kNodes = {0.033765242898423975, 0.16939530676686776,
                                          0.38069040695840156,  0.61930959304159844,
                                          0.83060469323313224,  0.96623475710157603};
constexpr std::array<double, 6> kWeights = {0.085662246189585178, 0.18038078652406930,
                                            0.23395696728634552,  0.23395696728634552,
                                            0.18038078652406930,  0.085662246189585178};

// (log(1/|x-y|), (x-y)^perp / |x-y|^2) / (2 pi); area mode (x == nullptr)
// integrates 1.
Eigen::Vector3d kernel(const Point* x, const Point& y) {
  if (x == nullptr) return {1.0, 0.0, 0.0};
  const Point r = *x - y;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) return Eigen::Vector3d::Zero();
  return {-0.5 * std::log(r2) * kInv2Pi, -r.y() / r2 * kInv2Pi, r.x() / r2 * kInv2Pi};
}

Eigen::Vector3d gauss_square(const Point* x, const Point& lo, double size) {
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      acc += kWeights[i] * kWeights[j] * kernel(x, lo + size * Point(kNodes[i], kNodes[j]));
    }
  }
  return acc * size * size;
}

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Collapsed-coordinate Gauss rule on a triangle.
Eigen::Vector3d gauss_triangle(const Point* x, const Point& A, const Point& B, const Point& C) {
  const double jac = std::abs(cross(B - A, C - B));
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  if (jac == 0.0) return acc;
  for (int i = 0; i < 6; ++i) {
    const double u = kNodes[i];
    for (int j = 0; j < 6; ++j) {
      const Point y = A + u * (B - A) + u * kNodes[j] * (C - B);
      acc += kWeights[i] * kWeights[j] * u * kernel(x, y);
    }
  }
  return acc * jac;
}

double polygon_area(const std::vector<Point>& p) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * std::abs(s);
}

// Square clipped to the half-plane n . (y - f) <= 0.
std::vector<Point> clip_square(const Point& lo, double size, const Point& f, const Point& n) {
  const std::array<Point, 4> sq = {lo, lo + Point(size, 0.0), lo + Point(size, size), lo + Point(0.0, size)};
  std::vector<Point> out;
  for (int i = 0; i < 4; ++i) {
    const Point& a = sq[i];
    const Point& b = sq[(i + 1) % 4];
    const double ga = n.dot(a - f), gb = n.dot(b - f);
    if (ga <= 0.0) out.push_back(a);
    if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) out.push_back(a + (ga / (ga - gb)) * (b - a));
  }
  return out;
}

double distance_to_square(const Point& x, const Point& lo, double size) {
  const double dx = std::max({lo.x() - x.x(), 0.0, x.x() - lo.x() - size});
  const double dy = std::max({lo.y() - x.y(), 0.0, x.y() - lo.y() - size});
  return std::hypot(dx, dy);
}

bool in_square(const Point& x, const Point& lo, double size) {
  return x.x() >= lo.x() && x.x() <= lo.x() + size && x.y() >= lo.y() && x.y() <= lo.y() + size;
}

// Equal-area disc centred at x: (1/2pi) * pi rho^2 (log(1/rho) + 1/2); the
// velocity integral vanishes by symmetry.
Eigen::Vector3d singular_cell(double area) {
  const double rho = std::sqrt(area / kPi);
  return {kInv2Pi * kPi * rho * rho * (std::log(1.0 / rho) + 0.5), 0.0, 0.0};
}

struct CutModel {
  Point foot, normal, tangent;
  double kappa;

  double g(const Point& y) const {
    const double t = tangent.dot(y - foot);
    return normal.dot(y - foot) + 0.5 * kappa * t * t;
  }
};

struct Integrator {
  const Point* x;
  double min_size;
  int max_depth;
  bool curvature;

  void depth_check(int depth) const {
    if (depth > max_depth) {
      std::ostringstream os;
      os << "quadrature subdivision depth cap " << max_depth << " exceeded near x = ("
         << (x ? x->x() : 0.0) << ", " << (x ? x->y() : 0.0) << ")";
      throw QuadratureDepthError(os.str());
    }
  }

  bool near(const Point& lo, double size) const {
    return x != nullptr && distance_to_square(*x, lo, size) < size;
  }

  void square(const Point& lo, double size, int depth, Eigen::Vector3d& acc) const {
    if (!near(lo, size)) {
      acc += gauss_square(x, lo, size);
      return;
    }
    if (size <= min_size) {
      acc += in_square(*x, lo, size) ? singular_cell(size * size) : gauss_square(x, lo, size);
      return;
    }
    depth_check(depth + 1);
    const double h = 0.5 * size;
    for (int k = 0; k < 4; ++k) square(lo + Point((k & 1) * h, (k >> 1) * h), h, depth + 1, acc);
  }

  void cut(const CutModel& m, const Point& lo, double size, int depth, Eigen::Vector3d& acc) const {
    const std::array<Point, 4> corners = {lo, lo + Point(size, 0.0), lo + Point(size, size),
                                          lo + Point(0.0, size)};
    int inside = 0;
    for (const Point& c : corners) inside += m.g(c) <= 0.0;
    if (near(lo, size) && size > min_size) {
      int beyond = 0;
      for (const Point& c : corners) beyond += m.g(c) > 0.0 && m.normal.dot(c - m.foot) > 0.0;
      if (beyond == 4) return;
      if (inside == 4 && m.g(lo + Point(0.5 * size, 0.5 * size)) <= 0.0) {
        square(lo, size, depth, acc);
        return;
      }
      depth_check(depth + 1);
      const double h = 0.5 * size;
      for (int k = 0; k < 4; ++k) cut(m, lo + Point((k & 1) * h, (k >> 1) * h), h, depth + 1, acc);
      return;
    }
    const std::vector<Point> poly = clip_square(lo, size, m.foot, m.normal);
    if (x != nullptr && size <= min_size && in_square(*x, lo, size)) {
      acc += (polygon_area(poly) / (size * size)) * singular_cell(size * size);
      return;
    }
    for (size_t i = 1; i + 1 < poly.size(); ++i) acc += gauss_triangle(x, poly[0], poly[i], poly[i + 1]);
    if (curvature && m.kappa != 0.0) sliver(m, lo, size, acc);
  }

  // Removes the strip between the tangent line and the curved boundary,
  // thickness kappa t^2 / 2, collapsed onto the chord inside the cell.
  void sliver(const CutModel& m, const Point& lo, double size, Eigen::Vector3d& acc) const {
    double t0 = -INFINITY, t1 = INFINITY;
    for (int axis = 0; axis < 2; ++axis) {
      const double d = m.tangent[axis];
      const double a = lo[axis] - m.foot[axis], b = lo[axis] + size - m.foot[axis];
      if (std::abs(d) < 1e-300) {
        if (a > 0.0 || b < 0.0) return;
        continue;
      }
      double ta = a / d, tb = b / d;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return;
    const double len = t1 - t0;
    for (int i = 0; i < 6; ++i) {
      const double t = t0 + len * kNodes[i];
      acc -= kWeights[i] * len * 0.5 * m.kappa * t * t * kernel(x, m.foot + t * m.tangent);
    }
  }
};

}  // namespace

QuadratureDomain::QuadratureDomain(ShapeSpec shape, QuadratureOptions opts)
    : shape_(std::move(shape)), opts_(opts) {
  shape_.validate();
  if (!(opts_.accuracy >= 1e-6)) throw std::invalid_argument("quadrature accuracy must be >= 1e-6");
  if (opts_.max_depth < 1) throw std::invalid_argument("max_depth must be positive");
  const double ell = shape_.scale();
  // Cut-cell error scales like kappa^2 s^4 per unit boundary length with the
  // curvature sliver (kappa s^2 without it).
  leaf_size_ = opts_.curvature_correction ? 0.5 * ell * std::pow(opts_.accuracy, 0.25)
                                          : 0.5 * ell * std::sqrt(opts_.accuracy);
  min_size_ = 1e-2 * opts_.accuracy * ell;
  const double half = 1.001 * shape_.outer_radius();
  nodes_.resize(1);
  const Node root = make(shape_.center - Point(half, half), 2.0 * half);
  nodes_[0] = root;
}

QuadratureDomain::Node QuadratureDomain::make(const Point& lo, double size) {
  Node n;
  n.lo = lo;
  n.size = size;
  const Point c = lo + Point(0.5 * size, 0.5 * size);
  const double half_diag = size * std::numbers::sqrt2 / 2.0;
  const double sd = shape_.signed_distance(c);
  if (sd >= half_diag) {
    n.size = 0.0;  // empty
    return n;
  }
  if (sd <= -half_diag) {
    n.kind = Node::inside;
    ++leaves_;
    return n;
  }
  if (size > leaf_size_) {
    n.kind = Node::parent;
    n.child = static_cast<int>(nodes_.size());
    nodes_.resize(nodes_.size() + 4);
    const double h = 0.5 * size;
    for (int k = 0; k < 4; ++k) {
      const Node child = make(lo + Point((k & 1) * h, (k >> 1) * h), h);
      nodes_[n.child + k] = child;
    }
    return n;
  }
  n.kind = Node::boundary;
  const double th = shape_.nearest_parameter(c);
  n.foot = shape_.boundary(th);
  n.normal = shape_.normal(th);
  n.tangent = shape_.tangent(th);
  n.kappa = opts_.curvature_correction ? shape_.curvature(th) : 0.0;
  ++leaves_;
  return n;
}

namespace {

template <typename Nodes, typename Fn>
void walk(const Nodes& nodes, int id, int depth, Fn&& fn) {
  const auto& n = nodes[id];
  if (n.size == 0.0) return;
  if (n.kind == std::decay_t<decltype(n)>::parent) {
    for (int k = 0; k < 4; ++k) walk(nodes, n.child + k, depth + 1, fn);
    return;
  }
  fn(n, depth);
}

}  // namespace

Eigen::Vector3d QuadratureDomain::integrate(const Point& x) const {
  Integrator in{&x, min_size_, opts_.max_depth, opts_.curvature_correction};
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  walk(nodes_, 0, 0, [&](const Node& n, int depth) {
    if (n.kind == Node::inside) {
      in.square(n.lo, n.size, depth, acc);
    } else {
      in.cut(CutModel{n.foot, n.normal, n.tangent, n.kappa}, n.lo, n.size, depth, acc);
    }
  });
  return acc;
}

double QuadratureDomain::area_estimate() const {
  Integrator in{nullptr, min_size_, opts_.max_depth, opts_.curvature_correction};
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  walk(nodes_, 0, 0, [&](const Node& n, int depth) {
    if (n.kind == Node::inside) {
      in.square(n.lo, n.size, depth, acc);
    } else {
      in.cut(CutModel{n.foot, n.normal, n.tangent, n.kappa}, n.lo, n.size, depth, acc);
    }
  });
  return acc[0];
}

double newtonian_potential(const QuadratureDomain& dom, const Point& x) { return dom.integrate(x)[0]; }

Point freespace_velocity(const QuadratureDomain& dom, const Point& x) {
  const Eigen::Vector3d r = dom.integrate(x);
  return {r[1], r[2]};
}

BoundaryConstancy boundary_constancy(const QuadratureDomain& dom, int samples) {
  if (samples < 8) throw std::invalid_argument("need at least 8 boundary samples");
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) {
    vals[i] = newtonian_potential(dom, dom.shape().boundary(2.0 * kPi * i / samples));
  }
  BoundaryConstancy out;
  out.samples = samples;
  double s = 0.0;
  for (double v : vals) s += v;
  out.mean = s / samples;
  double q = 0.0;
  for (double v : vals) q += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(q / samples);
  return out;
}

ContourQuadrature::ContourQuadrature(const ShapeSpec& shape, int nodes) {
  if (nodes < 16) throw std::invalid_argument("contour quadrature needs >= 16 nodes");
  y_.resize(nodes);
  dy_.resize(nodes);
  const double dth = 2.0 * kPi / nodes;
  double perimeter = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = dth * k;
    y_[k] = shape.boundary(th);
    dy_[k] = shape.boundary_derivative(th) * dth;
    perimeter += dy_[k].norm();
  }
  spacing_ = perimeter / nodes;
}

Point ContourQuadrature::velocity(const Point& x) const {
  Point acc = Point::Zero();
  for (size_t k = 0; k < y_.size(); ++k) acc += 0.5 * std::log((x - y_[k]).squaredNorm()) * dy_[k];
  return -kInv2Pi * acc;
}

double ContourQuadrature::stream(const Point& x) const {
  double acc = 0.0;
  for (size_t k = 0; k < y_.size(); ++k) {
    const Point r = y_[k] - x;
    const Point nds(dy_[k].y(), -dy_[k].x());
    acc += r.dot(nds) * (0.25 * std::log(r.squaredNorm()) - 0.25);
  }
  return kInv2Pi * acc;
}

Eigen::Vector4d ContourQuadrature::velocity_gradient(const Point& x, double step) const {
  const Point e1(step, 0.0), e2(0.0, step);
  const Point d1 = (velocity(x + e1) - velocity(x - e1)) / (2.0 * step);
  const Point d2 = (velocity(x + e2) - velocity(x - e2)) / (2.0 * step);
  return {d1.x(), d2.x(), d1.y(), d2.y()};
}

StationaryCase parse_stationary_case(const std::string& name) {
  if (name == "euler-disc") return StationaryCase::euler_disc;
  if (name == "mhd-concentric") return StationaryCase::mhd_concentric;
  if (name == "mhd-equal") return StationaryCase::mhd_equal;
  if (name == "mhd-offset") return StationaryCase::mhd_offset;
  throw std::invalid_argument("unknown stationary case '" + name +
                              "' (euler-disc, mhd-concentric, mhd-equal, mhd-offset)");
}

std::string to_string(StationaryCase c) {
  switch (c) {
    case StationaryCase::euler_disc:
      return "euler-disc";
    case StationaryCase::mhd_concentric:
      return "mhd-concentric";
    case StationaryCase::mhd_equal:
      return "mhd-equal";
    case StationaryCase::mhd_offset:
      return "mhd-offset";
  }
  return "?";
}

double stationarity_floor(double accuracy) { return 10.0 * accuracy; }

namespace {

double rms(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x * x;
  return std::sqrt(s / xs.size());
}

}  // namespace

VerdictReport stationarity_verdict(const VerdictRequest& req) {
  if (!(req.r > 0.0)) throw std::invalid_argument("patch radius must be positive");
  const Point origin = Point::Zero();
  ShapeSpec omega_shape = ShapeSpec::disc(origin, req.r);
  std::optional<ShapeSpec> d_shape;
  bool merged = false;
  switch (req.kind) {
    case StationaryCase::euler_disc:
      break;
    case StationaryCase::mhd_concentric:
      if (!(req.R > 0.0)) throw std::invalid_argument("current patch radius must be positive");
      d_shape = ShapeSpec::disc(origin, req.R);
      merged = req.R == req.r;
      break;
    case StationaryCase::mhd_equal:
      omega_shape = req.shape.value_or(omega_shape);
      d_shape = omega_shape;
      merged = true;
      break;
    case StationaryCase::mhd_offset: {
      if (!(req.d > 0.0)) throw std::invalid_argument("offset case needs d > 0 (d = 0 is mhd-equal)");
      if (std::abs(req.d - 2.0 * req.r) <= 1e-9 * std::max(1.0, req.r)) {
        throw std::invalid_argument("tangent boundaries: stationarity is undefined there, rejected");
      }
      omega_shape = ShapeSpec::disc(Point(-0.5 * req.d, 0.0), req.r);
      d_shape = ShapeSpec::disc(Point(0.5 * req.d, 0.0), req.r);
      break;
    }
  }

  QuadratureOptions qo;
  qo.accuracy = req.accuracy;
  const QuadratureDomain qw(omega_shape, qo);
  std::optional<QuadratureDomain> qj;
  if (d_shape && !merged) qj.emplace(*d_shape, qo);

  auto v_at = [&](const Point& x) { return freespace_velocity(qw, x); };
  auto b_at = [&](const Point& x) -> Point {
    if (!d_shape) return Point::Zero();
    return merged ? v_at(x) : freespace_velocity(*qj, x);
  };

  // Normal-flux sheets on the boundaries.
  std::vector<double> strengths;
  double speed = 0.0;
  auto sample_boundary = [&](const ShapeSpec& s, bool is_omega) {
    for (int i = 0; i < req.samples; ++i) {
      const double th = 2.0 * kPi * i / req.samples;
      const Point x = s.boundary(th), n = s.normal(th);
      const Point v = v_at(x), b = b_at(x);
      speed = std::max(speed, v.norm() + b.norm());
      if (merged) {
        strengths.push_back((v - b).dot(n));
      } else {
        strengths.push_back(v.dot(n));
        if (d_shape) strengths.push_back(b.dot(n));
        (void)is_omega;
      }
    }
  };
  sample_boundary(omega_shape, true);
  if (d_shape && !merged) sample_boundary(*d_shape, false);

  VerdictReport rep;
  rep.case_name = to_string(req.kind);
  rep.sheet = speed > 0.0 ? rms(strengths) / speed : 0.0;

  // Bilinear source on an evaluation grid away from the boundaries.
  const ContourQuadrature cw(omega_shape);
  std::optional<ContourQuadrature> cj;
  if (d_shape && !merged) cj.emplace(*d_shape);
  double extent = omega_shape.center.norm() + omega_shape.outer_radius();
  if (d_shape) extent = std::max(extent, d_shape->center.norm() + d_shape->outer_radius());
  const double box = 1.25 * extent;
  const double h = 2.0 * box / req.eval_n;
  const double band = std::max(8.0 * cw.node_spacing(), 0.5 * h);
  const double step = 1e-4 * omega_shape.scale();
  std::vector<double> sources;
  double scale = 0.0;
  for (int a = 0; a < req.eval_n; ++a) {
    for (int c = 0; c < req.eval_n; ++c) {
      const Point x(-box + (c + 0.5) * h, -box + (a + 0.5) * h);
      if (std::abs(omega_shape.signed_distance(x)) < band) continue;
      if (d_shape && std::abs(d_shape->signed_distance(x)) < band) continue;
      if (!d_shape) {
        rep.map.push_back({x, 0.0});
        continue;
      }
      const Eigen::Vector4d gv = cw.velocity_gradient(x, step);
      const Eigen::Vector4d gb = merged ? gv : cj->velocity_gradient(x, step);
      const double s = 2.0 * ((gb[0] * gv[2] + gb[2] * gv[3]) - (gb[1] * gv[0] + gb[3] * gv[1]));
      scale = std::max(scale, gv.norm() * gb.norm());
      sources.push_back(s);
      rep.map.push_back({x, s});
    }
  }
  rep.source = scale > 0.0 ? rms(sources) / scale : 0.0;
  rep.residual = std::max(rep.sheet, rep.source);

  rep.floor = stationarity_floor(req.accuracy);
  if (req.kind == StationaryCase::euler_disc) {
    rep.euler_reference = rep.residual;
  } else {
    VerdictRequest ref = req;
    ref.kind = StationaryCase::euler_disc;
    ref.eval_n = 8;
    rep.euler_reference = stationarity_verdict(ref).residual;
  }
  rep.threshold = 3.0 * std::max(rep.euler_reference, rep.floor);
  rep.stationary = rep.residual <= rep.threshold;
  return rep;
}

}  // namespace mhd
