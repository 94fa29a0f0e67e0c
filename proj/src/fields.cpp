#include "mhdlab/fields.hpp"

#include "mhdlab/util.hpp"

#include <cmath>
#include <sstream>

namespace mhd {
namespace {

ScalarField project_mean(ScalarField f, const char* name) {
  const double m = f.mean();
  if (std::abs(m) > 1e-12 * std::max(1.0, f.sup())) {
    std::ostringstream os;
    os << name << " has non-zero mean " << m << "; projecting it out";
    log::warn(os.str());
  }
  f.values -= m;
  return f;
}

ScalarField neg(ScalarField f) {
  f.values = -f.values;
  return f;
}

// Pointwise d1 b . grad v2 - d2 b . grad v1 with the pairing that makes
// H(v, v) vanish exactly when d2 v2 == -d1 v1.
RealArray h_form(const Gradient& gv, const Gradient& gb) {
  const RealArray& v11 = gv[0].values;  // d1 v1
  const RealArray& v21 = gv[1].values;  // d2 v1
  const RealArray& v12 = gv[2].values;  // d1 v2
  const RealArray& v22 = gv[3].values;  // d2 v2
  const RealArray& b11 = gb[0].values;
  const RealArray& b21 = gb[1].values;
  const RealArray& b12 = gb[2].values;
  const RealArray& b22 = gb[3].values;
  return (b11 * v12 + b12 * v22) - (b21 * v11 + b22 * v21);
}

Spectrum divergence_spectrum(const ScalarField& flux1, const ScalarField& flux2) {
  Spectrum s = derivative(forward(flux1), 1);
  s.coeffs += derivative(forward(flux2), 2).coeffs;
  return s;
}

struct Potentials {
  Spectrum stream;
  VectorField velocity;
  Gradient grad;
};

Potentials potentials_of(const Spectrum& vorticity) {
  Spectrum stream = inverse_laplacian(vorticity);
  VectorField vel(neg(inverse(derivative(stream, 2))), inverse(derivative(stream, 1)), true);
  Gradient grad = stream_gradient(stream);
  return {std::move(stream), std::move(vel), std::move(grad)};
}

Spectrum truncated(const ScalarField& f) {
  Spectrum s = forward(f);
  s.zero_mean();
  return dealias(std::move(s));
}

}  // namespace

MHDState::MHDState(ScalarField omega_in, ScalarField j_in, double t)
    : omega(project_mean(std::move(omega_in), "omega")),
      j(project_mean(std::move(j_in), "j")),
      time(t) {
  omega.check_same(j);
}

Gradient stream_gradient(const Spectrum& stream) {
  ScalarField s11 = inverse(second_derivative(stream, 1, 1));
  ScalarField s12 = inverse(second_derivative(stream, 1, 2));
  ScalarField s22 = inverse(second_derivative(stream, 2, 2));
  // u = (-d2 s, d1 s)
  ScalarField d1u1 = neg(s12);
  ScalarField d2u2 = s12;
  return {std::move(d1u1), neg(std::move(s22)), std::move(s11), std::move(d2u2)};
}

DerivedFields derive_fields(const MHDState& state) {
  Potentials pv = potentials_of(forward(state.omega));
  Potentials pb = potentials_of(forward(state.j));
  return {std::move(pv.velocity), std::move(pb.velocity), std::move(pv.grad), std::move(pb.grad)};
}

Gradient vector_gradient(const VectorField& u) {
  const Spectrum s1 = forward(u.x);
  const Spectrum s2 = forward(u.y);
  return {inverse(derivative(s1, 1)), inverse(derivative(s1, 2)), inverse(derivative(s2, 1)),
          inverse(derivative(s2, 2))};
}

ScalarField bilinear_h(const Gradient& grad_v, const Gradient& grad_b) {
  return ScalarField(grad_v[0].grid, h_form(grad_v, grad_b));
}

ScalarField source_h(const VectorField& v, const VectorField& b) {
  v.x.check_same(b.x);
  auto truncated_gradient = [](const VectorField& u) {
    const Spectrum s1 = dealias(forward(u.x));
    const Spectrum s2 = dealias(forward(u.y));
    return Gradient{inverse(derivative(s1, 1)), inverse(derivative(s1, 2)),
                    inverse(derivative(s2, 1)), inverse(derivative(s2, 2))};
  };
  ScalarField h(v.grid(), 2.0 * h_form(truncated_gradient(v), truncated_gradient(b)));
  return inverse(dealias(forward(h)));
}

std::pair<ScalarField, ScalarField> rhs(const MHDState& state) {
  const Spectrum w_hat = truncated(state.omega);
  const Spectrum j_hat = truncated(state.j);
  const Potentials pv = potentials_of(w_hat);
  const Potentials pb = potentials_of(j_hat);
  const ScalarField w = inverse(w_hat);
  const ScalarField jj = inverse(j_hat);
  const VectorField& v = pv.velocity;
  const VectorField& b = pb.velocity;

  // d_t w = div(b j - v w),  d_t j = div(b w - v j) + 2 H(v, b)
  const ScalarField fw1(w.grid, b.x.values * jj.values - v.x.values * w.values);
  const ScalarField fw2(w.grid, b.y.values * jj.values - v.y.values * w.values);
  const ScalarField fj1(w.grid, b.x.values * w.values - v.x.values * jj.values);
  const ScalarField fj2(w.grid, b.y.values * w.values - v.y.values * jj.values);
  const ScalarField source(w.grid, 2.0 * h_form(pv.grad, pb.grad));

  Spectrum dw = divergence_spectrum(fw1, fw2);
  Spectrum dj = divergence_spectrum(fj1, fj2);
  dj.coeffs += forward(source).coeffs;
  dw = dealias(std::move(dw));
  dj = dealias(std::move(dj));
  dw.zero_mean();
  dj.zero_mean();
  return {inverse(dw), inverse(dj)};
}

ElsasserPair elsasser_forward(const ScalarField& f, const ScalarField& g) {
  f.check_same(g);
  return {ScalarField(f.grid, f.values + g.values), ScalarField(f.grid, f.values - g.values)};
}

std::pair<ScalarField, ScalarField> elsasser_inverse(const ElsasserPair& p) {
  return {ScalarField(p.phi.grid, 0.5 * (p.phi.values + p.psi.values)),
          ScalarField(p.phi.grid, 0.5 * (p.phi.values - p.psi.values))};
}

ElsasserPair elsasser_rhs(const ElsasserPair& z) {
  const Spectrum phi_hat = truncated(z.phi);
  const Spectrum psi_hat = truncated(z.psi);
  const Potentials plus = potentials_of(phi_hat);    // v + b
  const Potentials minus = potentials_of(psi_hat);   // v - b
  const ScalarField phi = inverse(phi_hat);
  const ScalarField psi = inverse(psi_hat);

  Spectrum sv = phi_hat;
  sv.coeffs = 0.5 * (phi_hat.coeffs + psi_hat.coeffs);
  Spectrum sb = phi_hat;
  sb.coeffs = 0.5 * (phi_hat.coeffs - psi_hat.coeffs);
  const ScalarField source(phi.grid, 2.0 * h_form(stream_gradient(inverse_laplacian(sv)),
                                                  stream_gradient(inverse_laplacian(sb))));
  const Spectrum s_hat = forward(source);

  const VectorField& zp = plus.velocity;
  const VectorField& zm = minus.velocity;
  Spectrum dphi = divergence_spectrum(ScalarField(phi.grid, -zm.x.values * phi.values),
                                      ScalarField(phi.grid, -zm.y.values * phi.values));
  Spectrum dpsi = divergence_spectrum(ScalarField(phi.grid, -zp.x.values * psi.values),
                                      ScalarField(phi.grid, -zp.y.values * psi.values));
  dphi.coeffs += s_hat.coeffs;
  dpsi.coeffs -= s_hat.coeffs;
  dphi = dealias(std::move(dphi));
  dpsi = dealias(std::move(dpsi));
  dphi.zero_mean();
  dpsi.zero_mean();
  return {inverse(dphi), inverse(dpsi)};
}

ScalarField conormal(const VectorField& X, const ScalarField& f) {
  X.x.check_same(f);
  const Gradient gx = vector_gradient(X);
  const double scale = gx[0].sup() + gx[3].sup();
  if (scale > 0.0) {
    const double div = (gx[0].values + gx[3].values).abs().maxCoeff();
    if (div > 1e-10 * scale) {
      std::ostringstream os;
      os << "co-normal field is not divergence-free (relative divergence " << div / scale << ")";
      log::warn(os.str());
    }
  }
  const ScalarField tf = inverse(dealias(forward(f)));
  const ScalarField t1 = inverse(dealias(forward(X.x)));
  const ScalarField t2 = inverse(dealias(forward(X.y)));
  Spectrum d = divergence_spectrum(product(t1, tf), product(t2, tf));
  return inverse(dealias(std::move(d)));
}

ScalarField directional(const VectorField& X, const ScalarField& u) {
  const VectorField g = gradient(u);
  return ScalarField(u.grid, X.x.values * g.x.values + X.y.values * g.y.values);
}

namespace {

struct MaskedSup {
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask;

  double sup(const RealArray& a) const {
    return mask.select(a.abs(), RealArray::Zero(a.rows(), a.cols())).maxCoeff();
  }
  double relative(const RealArray& lhs, const RealArray& rhs) const {
    const double denom = sup(lhs) + sup(rhs);
    return denom > 0.0 ? sup(lhs - rhs) / denom : 0.0;
  }
};

struct ConormalParts {
  RealArray dx_u1;  // X . grad u1
  RealArray dx_u2;  // X . grad u2
};

ConormalParts conormal_parts(const VectorField& X, const Gradient& g) {
  const RealArray& x1 = X.x.values;
  const RealArray& x2 = X.y.values;
  return {x1 * g[0].values + x2 * g[1].values, x1 * g[2].values + x2 * g[3].values};
}

}  // namespace

IdentityResiduals identity_residuals(const VectorField& X, const MHDState& state,
                                     double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  X.x.check_same(state.omega);
  const RealArray mag2 = X.x.values.square() + X.y.values.square();
  const double max_mag = std::sqrt(mag2.maxCoeff());
  const auto mask = (mag2.sqrt() > threshold * max_mag).eval();
  const size_t count = static_cast<size_t>(mask.count());
  if (max_mag == 0.0 || count == 0) {
    throw EmptyEvaluationSet("empty evaluation set: |X| never exceeds threshold * max|X|");
  }
  MaskedSup ms{mask};
  const RealArray& x1 = X.x.values;
  const RealArray& x2 = X.y.values;

  const DerivedFields d = derive_fields(state);
  IdentityResiduals out;
  out.points = count;

  auto riesz_identities = [&](const ScalarField& w, const Gradient& g) {
    const Spectrum s = forward(w);
    const RealArray r11 = inverse(riesz(s, 1, 1)).values;
    const RealArray r22 = inverse(riesz(s, 2, 2)).values;
    const RealArray r12 = inverse(riesz(s, 1, 2)).values;
    const ConormalParts c = conormal_parts(X, g);
    const RealArray& wv = w.values;
    double res = ms.relative(mag2 * r11, x1 * c.dx_u2 + x2 * c.dx_u1 + x2.square() * wv);
    res = std::max(res, ms.relative(mag2 * r22, -x2 * c.dx_u1 - x1 * c.dx_u2 + x1.square() * wv));
    res = std::max(res, ms.relative(mag2 * r12, -x1 * c.dx_u1 + x2 * c.dx_u2 - x1 * x2 * wv));
    return res;
  };
  out.yasser = std::max(riesz_identities(state.omega, d.grad_v), riesz_identities(state.j, d.grad_b));

  const RealArray lhs = h_form(d.grad_v, d.grad_b);
  const ConormalParts cv = conormal_parts(X, d.grad_v);
  const ConormalParts cb = conormal_parts(X, d.grad_b);
  const RealArray safe = mask.select(mag2, RealArray::Ones(mag2.rows(), mag2.cols()));
  const RealArray x_dot_dv = x1 * cv.dx_u1 + x2 * cv.dx_u2;
  const RealArray x_dot_db = x1 * cb.dx_u1 + x2 * cb.dx_u2;
  const RealArray rhs_val = 2.0 * (cb.dx_u1 * cv.dx_u2 - cb.dx_u2 * cv.dx_u1) / safe +
                            (state.j.values * x_dot_dv - state.omega.values * x_dot_db) / safe;
  out.iden1 = ms.relative(lhs, rhs_val);
  return out;
}

double gradient_bound_constant(const VectorField& X, const MHDState& state, double threshold) {
  const RealArray mag2 = X.x.values.square() + X.y.values.square();
  const double xinf = std::sqrt(mag2.maxCoeff());
  const auto mask = (mag2.sqrt() > threshold * xinf).eval();
  if (xinf == 0.0 || mask.count() == 0) throw EmptyEvaluationSet("empty evaluation set");
  const DerivedFields d = derive_fields(state);
  const ConormalParts c = conormal_parts(X, d.grad_v);
  const double dxv = (c.dx_u1.square() + c.dx_u2.square()).sqrt().maxCoeff();
  const double bound = xinf * dxv + xinf * xinf * state.omega.sup();
  RealArray gv = RealArray::Zero(mag2.rows(), mag2.cols());
  for (const auto& g : d.grad_v) gv += g.values.square();
  const RealArray lhs = mag2 * gv.sqrt();
  const double worst = mask.select(lhs, RealArray::Zero(lhs.rows(), lhs.cols())).maxCoeff();
  return bound > 0.0 ? worst / bound : 0.0;
}

}  // namespace mhd
