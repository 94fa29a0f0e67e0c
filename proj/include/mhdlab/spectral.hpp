#pragma once

#include "mhdlab/grid.hpp"

#include <vector>

namespace mhd {

/// Half-plane (real-to-complex) Fourier coefficients of a real field.
///
/// Rows index k2 (signed via Grid::signed_index), columns index k1 = 0..n/2.
/// Coefficients are unnormalized: the inverse transform divides by n^2.
struct Spectrum {
  Grid grid;
  ComplexArray coeffs;

  explicit Spectrum(const Grid& g) : grid(g), coeffs(ComplexArray::Zero(g.n(), g.spectral_cols())) {}

  bool is_nyquist(int row, int col) const {
    return row == grid.n() / 2 || col == grid.n() / 2;
  }

  /// Multiplies every coefficient by symbol(xi1, xi2, row, col).
  template <typename Symbol>
  Spectrum& apply(Symbol&& symbol) {
    const int n = grid.n();
    for (int r = 0; r < n; ++r) {
      const double k2 = grid.wavenumber(grid.signed_index(r));
      for (int c = 0; c < grid.spectral_cols(); ++c) {
        coeffs(r, c) *= symbol(grid.wavenumber(c), k2, r, c);
      }
    }
    return *this;
  }

  Spectrum& zero_mean() {
    coeffs(0, 0) = 0.0;
    return *this;
  }
};

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

// Spectrum-level operators. Odd-order derivatives drop the Nyquist row and
// column so real data stays real; even-order symbols keep them.
Spectrum derivative(Spectrum s, int axis);
Spectrum second_derivative(Spectrum s, int axis_i, int axis_j);
Spectrum inverse_laplacian(Spectrum s);
Spectrum laplacian(Spectrum s);
Spectrum riesz(Spectrum s, int i, int j);
Spectrum lp_project(Spectrum s, int q);
Spectrum dealias(Spectrum s);
Spectrum exponential_filter(Spectrum s, double strength, int order = 36);

/// True when max(|k1|,|k2|) lies in the retained two-thirds range.
inline bool retained_mode(const Grid& g, int row, int col) {
  const int k2 = std::abs(g.signed_index(row));
  return 3 * std::max(col, k2) <= g.n();
}

// Field-level operators. Axes are 1 (x1) and 2 (x2), matching the math.
ScalarField derivative(const ScalarField& f, int axis);
ScalarField inverse_laplacian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
VectorField biot_savart(const ScalarField& omega);
ScalarField riesz(const ScalarField& f, int i, int j);
ScalarField lp_project(const ScalarField& f, int q);
ScalarField dealias(const ScalarField& f);
ScalarField exponential_filter(const ScalarField& f, double strength, int order = 36);
ScalarField mean_projected(const ScalarField& f);

VectorField gradient(const ScalarField& f);
/// (-d2 f, d1 f).
VectorField perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// d1 v2 - d2 v1.
ScalarField curl(const VectorField& v);

/// Dealiased pointwise product: both factors truncated to the two-thirds
/// range before multiplying, result truncated again.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

/// Low-pass cut-off of the dyadic partition, as a function of |xi|.
double lp_low_pass(double xi);
/// Annulus multiplier of block q >= -1.
double lp_symbol(double xi, int q);
/// Highest block index whose multiplier is non-zero on some grid mode.
int max_lp_block(const Grid& g);

/// Grid L2 norm via Parseval, (cell-area weighted).
double parseval_l2(const Spectrum& s);

/// Evaluates the trigonometric interpolant of a spectrum at arbitrary points.
/// Nyquist modes are dropped (their off-grid continuation is ambiguous).
class PointEvaluator {
 public:
  explicit PointEvaluator(const Spectrum& s);

  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  /// Values at many points, evaluated row-by-row.
  std::vector<double> values(const std::vector<Point>& xs) const;

 private:
  struct Row {
    double k2;
    std::vector<double> re, im;  // weighted, normalized; index = k1 index
  };
  template <bool WithK1, typename Fn>
  void accumulate(const Point& x, Fn&& fn) const;

  Grid grid_;
  std::vector<Row> rows_;
  int max_col_ = 0;
};

}  // namespace mhd
