#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace mhd {

using RealArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexArray =
    Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::Vector2d;

/// Uniform periodic grid on the square [0, L)^2 with n points per axis.
///
/// Sample (row, col) sits at x1 = col * spacing, x2 = row * spacing, so the
/// row-major storage runs along x1 fastest.
class Grid {
 public:
  Grid(int n, double length) : n_(n), length_(length) {
    if (n < 16 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("grid size must be a power of two >= 16");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw std::invalid_argument("box length must be positive and finite");
    }
  }

  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_area() const { return spacing() * spacing(); }

  /// Number of stored columns of a real-to-complex spectrum.
  int spectral_cols() const { return n_ / 2 + 1; }

  /// Signed integer wavenumber for a spectrum row index.
  int signed_index(int row) const { return row <= n_ / 2 ? row : row - n_; }

  /// Physical wavenumber 2*pi*k/L.
  double wavenumber(int k) const { return 2.0 * std::numbers::pi * k / length_; }

  double coordinate(int i) const { return i * spacing(); }
  Point center() const { return {0.5 * length_, 0.5 * length_}; }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  int n_;
  double length_;
};

/// Real samples of a scalar function on a Grid.
struct ScalarField {
  Grid grid;
  RealArray values;

  explicit ScalarField(const Grid& g) : grid(g), values(RealArray::Zero(g.n(), g.n())) {}
  ScalarField(const Grid& g, RealArray v) : grid(g), values(std::move(v)) {
    if (values.rows() != g.n() || values.cols() != g.n()) {
      throw std::invalid_argument("field shape does not match grid");
    }
  }

  template <typename Fn>
  static ScalarField sample(const Grid& g, Fn&& fn) {
    ScalarField f(g);
    for (int r = 0; r < g.n(); ++r) {
      for (int c = 0; c < g.n(); ++c) {
        f.values(r, c) = fn(g.coordinate(c), g.coordinate(r));
      }
    }
    return f;
  }

  static ScalarField constant(const Grid& g, double c) {
    return ScalarField(g, RealArray::Constant(g.n(), g.n(), c));
  }

  double mean() const { return values.mean(); }
  double sup() const { return values.abs().maxCoeff(); }
  bool finite() const { return values.allFinite(); }

  ScalarField& operator+=(const ScalarField& o) {
    check_same(o);
    values += o.values;
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check_same(o);
    values -= o.values;
    return *this;
  }
  ScalarField& operator*=(double s) {
    values *= s;
    return *this;
  }

  void check_same(const ScalarField& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("fields live on different grids");
  }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator*(ScalarField a, double s) { return a *= s; }

/// Pointwise product.
inline ScalarField product(const ScalarField& a, const ScalarField& b) {
  a.check_same(b);
  return ScalarField(a.grid, a.values * b.values);
}

/// Planar vector field; `divergence_free` is set by constructors that
/// produce a perpendicular gradient.
struct VectorField {
  ScalarField x;
  ScalarField y;
  bool divergence_free = false;

  explicit VectorField(const Grid& g) : x(g), y(g) {}
  VectorField(ScalarField a, ScalarField b, bool div_free = false)
      : x(std::move(a)), y(std::move(b)), divergence_free(div_free) {
    x.check_same(y);
  }

  const Grid& grid() const { return x.grid; }
  const ScalarField& operator[](int i) const { return i == 0 ? x : y; }
  ScalarField& operator[](int i) { return i == 0 ? x : y; }

  RealArray magnitude() const { return (x.values.square() + y.values.square()).sqrt(); }
  double sup() const { return magnitude().maxCoeff(); }
};

inline VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a.x + b.x, a.y + b.y, a.divergence_free && b.divergence_free};
}
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a.x - b.x, a.y - b.y, a.divergence_free && b.divergence_free};
}
inline VectorField operator*(double s, const VectorField& a) {
  return {s * a.x, s * a.y, a.divergence_free};
}

/// Minimum-image displacement on the torus.
inline double wrap_displacement(double d, double length) {
  return d - length * std::round(d / length);
}

inline double wrap_coordinate(double x, double length) {
  double w = std::fmod(x, length);
  return w < 0.0 ? w + length : w;
}

}  // namespace mhd
