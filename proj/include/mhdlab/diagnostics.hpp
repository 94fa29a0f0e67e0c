#pragma once

#include "mhdlab/fields.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mhd {

/// Cell-weighted grid L^p norm; p = infinity gives the sup norm.
double lp_norm(const ScalarField& f, double p);

/// max over LP blocks q of 2^{qs} sup|Delta_q f|, s in (0, 1).
double holder_norm(const ScalarField& f, double s);
/// Direct estimator sup|f| + sup |f(x + d) - f(x)| / |d|^s over dyadic grid
/// shifts d along both axes and both diagonals.
double holder_modulus(const ScalarField& f, double s);

/// (1/2)(|v|_2^2 + |b|_2^2).
double energy(const MHDState& state);

/// sup over the grid of the Frobenius norm of a gradient.
double gradient_sup(const Gradient& g);

struct StationarityResidual {
  double l2_omega = 0.0;
  double l2_j = 0.0;
  double sup_omega = 0.0;
  double sup_j = 0.0;
  /// L2 norms divided by the L2 norm of the pointwise transport scale
  /// |v||grad w| + |b||grad j| (and its analogue for the j equation).
  double relative = 0.0;
};

StationarityResidual stationarity_residual(const MHDState& state);

struct ConormalNorms {
  double dx_omega = 0.0;  // |div(X omega)|_p
  double dx_j = 0.0;
  double wpx_omega = 0.0;  // max(|u|_1, |u|_inf) + |d_X u|_p
  double wpx_j = 0.0;
};

ConormalNorms conormal_norms(const VectorField& X, const MHDState& state, double p);

/// One row of the per-step diagnostics table. Quantities that a run does not
/// track stay 0 and are listed as untracked in its report.
struct DiagnosticsRecord {
  double t = 0.0;
  double p = 4.0;
  double omega_l1 = 0, omega_l2 = 0, omega_lp = 0, omega_linf = 0;
  double j_l1 = 0, j_l2 = 0, j_lp = 0, j_linf = 0;
  double energy = 0;
  double grad_v_sup = 0, grad_b_sup = 0, grad_sup = 0;
  double residual_l2_omega = 0, residual_l2_j = 0, residual_relative = 0;
  double tangency = 0;
  double frozen_in = 0;
  double conormal_omega = 0, conormal_j = 0;
  double holder_omega = 0, holder_j = 0;
};

/// Norms, energy, gradient sups and the stationarity residual of a state.
DiagnosticsRecord basic_record(const MHDState& state, double p, double holder_s = 0.5);

std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);
void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);

struct AprioriReport {
  double c_lp = 0.0;    // |(w,j)(t)|_p <= C |(w0,j0)|_p exp(C int |grad v|)
  double c_linf = 0.0;  // |(w,j)(t)|_inf <= C |(w0,j0)|_inf + int |grad v||grad b|
  double c_l1 = 0.0;    // |(w,j)(t)|_1 <= C |.|_1 + C |.|_2^2 t exp(C int |grad v|)
  double p = 0.0;
};

/// Smallest constants making each bound hold along the recorded series
/// (pair norms are |w| + |j|; time integrals by the trapezoid rule).
AprioriReport apriori_envelope(const std::vector<DiagnosticsRecord>& records);

/// Largest relative change of the fitted constants between two runs.
double envelope_drift(const AprioriReport& coarse, const AprioriReport& fine);

}  // namespace mhd
