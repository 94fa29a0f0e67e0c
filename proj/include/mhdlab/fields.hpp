#pragma once

#include "mhdlab/spectral.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace mhd {

/// Vorticity and current density of a 2D ideal MHD flow at time `time`.
/// Both fields are stored mean-free.
struct MHDState {
  ScalarField omega;
  ScalarField j;
  double time = 0.0;

  /// Mean-projects both fields (with a warning when a mean is removed).
  MHDState(ScalarField omega_in, ScalarField j_in, double t = 0.0);

  const Grid& grid() const { return omega.grid; }
  static MHDState zero(const Grid& g) { return MHDState(ScalarField(g), ScalarField(g)); }
};

/// Gradient components are ordered (d1 u1, d2 u1, d1 u2, d2 u2).
using Gradient = std::array<ScalarField, 4>;

struct DerivedFields {
  VectorField v;
  VectorField b;
  Gradient grad_v;
  Gradient grad_b;
};

struct ElsasserPair {
  ScalarField phi;  // f + g
  ScalarField psi;  // f - g
};

class EmptyEvaluationSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gradient of a Biot-Savart velocity, taken as second derivatives of the
/// stream function so that d2 u2 == -d1 u1 holds bit-exactly.
Gradient stream_gradient(const Spectrum& stream);

DerivedFields derive_fields(const MHDState& state);

/// Spectral gradient of an arbitrary vector field.
Gradient vector_gradient(const VectorField& u);

/// 2 (d1 b . grad v2 - d2 b . grad v1), products dealiased.
ScalarField source_h(const VectorField& v, const VectorField& b);
/// The unfactored bilinear form d1 b . grad v2 - d2 b . grad v1, pointwise
/// (no dealiasing). source_h carries exactly twice this quantity.
ScalarField bilinear_h(const Gradient& grad_v, const Gradient& grad_b);

/// Time derivatives (d_t omega, d_t j) of the vorticity-current system in
/// conservative form, both mean-free.
std::pair<ScalarField, ScalarField> rhs(const MHDState& state);

ElsasserPair elsasser_forward(const ScalarField& f, const ScalarField& g);
std::pair<ScalarField, ScalarField> elsasser_inverse(const ElsasserPair& p);

/// Time derivatives of (omega + j, omega - j): each is carried by v -/+ b and
/// forced by +/- source_h.
ElsasserPair elsasser_rhs(const ElsasserPair& z);

/// Co-normal derivative div(X f) of a dealiased product.
ScalarField conormal(const VectorField& X, const ScalarField& f);

/// X . grad u evaluated pointwise (no dealiasing).
ScalarField directional(const VectorField& X, const ScalarField& u);

struct IdentityResiduals {
  double yasser = 0.0;  // max over the three Riesz/co-normal identities, both fields
  double iden1 = 0.0;   // decomposition of the bilinear source
  size_t points = 0;    // grid points in the evaluation set
};

/// Pointwise residuals of the Riesz-transform identities
///   |X|^2 R11 w = X1 dX v2 + X2 dX v1 + X2^2 w  (and the R22, R12 analogues)
/// and of the decomposition of the bilinear source through X, on the set
/// {|X| > threshold * max|X|}. Each residual is sup|LHS - RHS| normalized by
/// sup|LHS| + sup|RHS|.
IdentityResiduals identity_residuals(const VectorField& X, const MHDState& state,
                                     double threshold = 0.1);

/// Smallest c with |X|^2 |grad v| <= c (|X|_inf |dX v|_inf + |X|_inf^2 |w|_inf)
/// on the same evaluation set.
double gradient_bound_constant(const VectorField& X, const MHDState& state,
                               double threshold = 0.1);

}  // namespace mhd
