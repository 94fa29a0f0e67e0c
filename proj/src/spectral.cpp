#include "mhdlab/spectral.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>

namespace mhd {
namespace {

constexpr std::complex<double> I{0.0, 1.0};

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

void require_axis(int axis) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
}

double pick(int axis, double k1, double k2) { return axis == 1 ? k1 : k2; }

}  // namespace

Spectrum forward(const ScalarField& f) {
  if (!f.finite()) throw std::domain_error("non-finite field passed to spectral transform");
  Spectrum s(f.grid);
  detail::fft_r2c(f.grid.n(), f.values.data(), s.coeffs.data());
  return s;
}

ScalarField inverse(const Spectrum& s) {
  ComplexArray scratch = s.coeffs;
  ScalarField f(s.grid);
  detail::fft_c2r(s.grid.n(), scratch.data(), f.values.data());
  const double n = s.grid.n();
  f.values /= n * n;
  return f;
}

Spectrum derivative(Spectrum s, int axis) {
  require_axis(axis);
  return std::move(s.apply([&](double k1, double k2, int r, int c) -> std::complex<double> {
    if (s.is_nyquist(r, c)) return 0.0;
    return I * pick(axis, k1, k2);
  }));
}

Spectrum second_derivative(Spectrum s, int axis_i, int axis_j) {
  require_axis(axis_i);
  require_axis(axis_j);
  return std::move(s.apply([&](double k1, double k2, int, int) -> std::complex<double> {
    return -pick(axis_i, k1, k2) * pick(axis_j, k1, k2);
  }));
}

Spectrum inverse_laplacian(Spectrum s) {
  s.apply([](double k1, double k2, int r, int c) -> std::complex<double> {
    if (r == 0 && c == 0) return 0.0;
    return -1.0 / (k1 * k1 + k2 * k2);
  });
  return s;
}

Spectrum laplacian(Spectrum s) {
  return std::move(s.apply(
      [](double k1, double k2, int, int) -> std::complex<double> { return -(k1 * k1 + k2 * k2); }));
}

Spectrum riesz(Spectrum s, int i, int j) {
  require_axis(i);
  require_axis(j);
  return std::move(s.apply([&](double k1, double k2, int r, int c) -> std::complex<double> {
    if (r == 0 && c == 0) return 0.0;
    return pick(i, k1, k2) * pick(j, k1, k2) / (k1 * k1 + k2 * k2);
  }));
}

double lp_low_pass(double xi) {
  if (xi <= 0.75) return 1.0;
  if (xi >= 1.0) return 0.0;
  return 1.0 - smoothstep5((xi - 0.75) / 0.25);
}

double lp_symbol(double xi, int q) {
  if (q < -1) throw std::invalid_argument("Littlewood-Paley block index must be >= -1");
  if (q == -1) return lp_low_pass(xi);
  const double scale = std::ldexp(1.0, q);
  return lp_low_pass(xi / (2.0 * scale)) - lp_low_pass(xi / scale);
}

int max_lp_block(const Grid& g) {
  const double xi_max = std::sqrt(2.0) * g.wavenumber(g.n() / 2);
  int q = -1;
  while (0.75 * std::ldexp(1.0, q + 1) < xi_max) ++q;
  return q;
}

Spectrum lp_project(Spectrum s, int q) {
  if (q < -1) throw std::invalid_argument("Littlewood-Paley block index must be >= -1");
  return std::move(s.apply([&](double k1, double k2, int, int) -> std::complex<double> {
    return lp_symbol(std::hypot(k1, k2), q);
  }));
}

Spectrum dealias(Spectrum s) {
  const Grid g = s.grid;
  return std::move(s.apply([&](double, double, int r, int c) -> std::complex<double> {
    return retained_mode(g, r, c) ? 1.0 : 0.0;
  }));
}

Spectrum exponential_filter(Spectrum s, double strength, int order) {
  const Grid g = s.grid;
  const double half = g.n() / 2;
  return std::move(s.apply([&](double, double, int r, int c) -> std::complex<double> {
    const double kinf = std::max<double>(c, std::abs(g.signed_index(r))) / half;
    return std::exp(-strength * std::pow(kinf, order));
  }));
}

ScalarField derivative(const ScalarField& f, int axis) {
  return inverse(derivative(forward(f), axis));
}
ScalarField inverse_laplacian(const ScalarField& f) { return inverse(inverse_laplacian(forward(f))); }
ScalarField laplacian(const ScalarField& f) { return inverse(laplacian(forward(f))); }
ScalarField riesz(const ScalarField& f, int i, int j) { return inverse(riesz(forward(f), i, j)); }
ScalarField lp_project(const ScalarField& f, int q) { return inverse(lp_project(forward(f), q)); }
ScalarField dealias(const ScalarField& f) { return inverse(dealias(forward(f))); }
ScalarField exponential_filter(const ScalarField& f, double strength, int order) {
  return inverse(exponential_filter(forward(f), strength, order));
}
ScalarField mean_projected(const ScalarField& f) {
  return ScalarField(f.grid, f.values - f.mean());
}

VectorField biot_savart(const ScalarField& omega) {
  const Spectrum psi = inverse_laplacian(forward(omega));
  ScalarField v1 = inverse(derivative(psi, 2));
  v1 *= -1.0;
  return {std::move(v1), inverse(derivative(psi, 1)), true};
}

VectorField gradient(const ScalarField& f) {
  const Spectrum s = forward(f);
  return {inverse(derivative(s, 1)), inverse(derivative(s, 2))};
}

VectorField perp_gradient(const ScalarField& f) {
  const Spectrum s = forward(f);
  ScalarField a = inverse(derivative(s, 2));
  a *= -1.0;
  return {std::move(a), inverse(derivative(s, 1)), true};
}

ScalarField divergence(const VectorField& v) {
  Spectrum s = derivative(forward(v.x), 1);
  s.coeffs += derivative(forward(v.y), 2).coeffs;
  return inverse(s);
}

ScalarField curl(const VectorField& v) {
  Spectrum s = derivative(forward(v.y), 1);
  s.coeffs -= derivative(forward(v.x), 2).coeffs;
  return inverse(s);
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  const ScalarField ta = inverse(dealias(forward(a)));
  const ScalarField tb = inverse(dealias(forward(b)));
  return inverse(dealias(forward(product(ta, tb))));
}

double parseval_l2(const Spectrum& s) {
  const int n = s.grid.n();
  double sum = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < s.grid.spectral_cols(); ++c) {
      const double w = (c == 0 || c == n / 2) ? 1.0 : 2.0;
      sum += w * std::norm(s.coeffs(r, c));
    }
  }
  return std::sqrt(sum * s.grid.cell_area()) / n;
}

PointEvaluator::PointEvaluator(const Spectrum& s) : grid_(s.grid) {
  const int n = grid_.n();
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int r = 0; r < n; ++r) {
    if (r == n / 2) continue;
    Row row;
    row.k2 = grid_.wavenumber(grid_.signed_index(r));
    int last = -1;
    for (int c = 0; c < n / 2; ++c) {
      if (s.coeffs(r, c) != std::complex<double>(0.0)) last = c;
    }
    if (last < 0) continue;
    row.re.resize(last + 1);
    row.im.resize(last + 1);
    for (int c = 0; c <= last; ++c) {
      const std::complex<double> w = s.coeffs(r, c) * (c == 0 ? norm : 2.0 * norm);
      row.re[c] = w.real();
      row.im[c] = w.imag();
    }
    max_col_ = std::max(max_col_, last + 1);
    rows_.push_back(std::move(row));
  }
}

// Plain real arithmetic: std::complex products go through the slow
// NaN-aware path without -ffast-math.
template <bool WithK1, typename Fn>
void PointEvaluator::accumulate(const Point& x, Fn&& fn) const {
  thread_local std::vector<double> pc, ps, kk;
  pc.resize(max_col_);
  ps.resize(max_col_);
  kk.resize(max_col_);
  for (int c = 0; c < max_col_; ++c) {
    kk[c] = grid_.wavenumber(c);
    pc[c] = std::cos(kk[c] * x.x());
    ps[c] = std::sin(kk[c] * x.x());
  }
  for (const Row& row : rows_) {
    double sr = 0.0, si = 0.0, kr = 0.0, ki = 0.0;
    const size_t m = row.re.size();
    for (size_t c = 0; c < m; ++c) {
      const double tr = row.re[c] * pc[c] - row.im[c] * ps[c];
      const double ti = row.re[c] * ps[c] + row.im[c] * pc[c];
      sr += tr;
      si += ti;
      if constexpr (WithK1) {
        kr += kk[c] * tr;
        ki += kk[c] * ti;
      }
    }
    const double a = row.k2 * x.y();
    fn(std::complex<double>(sr, si), std::complex<double>(kr, ki), row.k2,
       std::complex<double>(std::cos(a), std::sin(a)));
  }
}

double PointEvaluator::value(const Point& x) const {
  double total = 0.0;
  accumulate<false>(x, [&](std::complex<double> s, std::complex<double>, double, std::complex<double> e2) {
    total += s.real() * e2.real() - s.imag() * e2.imag();
  });
  return total;
}

Point PointEvaluator::gradient(const Point& x) const {
  Point g = Point::Zero();
  accumulate<true>(x, [&](std::complex<double> s, std::complex<double> sk1, double k2,
                          std::complex<double> e2) {
    // Re(i z e2) = -Im(z e2)
    g.x() -= sk1.real() * e2.imag() + sk1.imag() * e2.real();
    g.y() -= k2 * (s.real() * e2.imag() + s.imag() * e2.real());
  });
  return g;
}

std::vector<double> PointEvaluator::values(const std::vector<Point>& xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(value(x));
  return out;
}

}  // namespace mhd
