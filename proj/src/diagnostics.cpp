#include "mhdlab/diagnostics.hpp"

#include "mhdlab/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mhd {
namespace {

double sum_of(const RealArray& a) { return pairwise_sum(std::span<const double>(a.data(), a.size())); }

double rms(const RealArray& a) { return std::sqrt(sum_of(a.square()) / static_cast<double>(a.size())); }

// Smallest C >= 1 with g(C) >= 0 for an increasing g.
template <typename Fn>
double smallest_constant(Fn&& g) {
  if (g(1.0) >= 0.0) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p) && p > 0) return f.sup();
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  const RealArray a = f.values.abs();
  const double s = p == 1.0 ? sum_of(a) : p == 2.0 ? sum_of(a.square()) : sum_of(a.pow(p));
  return std::pow(s * f.grid.cell_area(), 1.0 / p);
}

double holder_norm(const ScalarField& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("Holder exponent must lie in (0, 1)");
  const Spectrum fh = forward(f);
  double best = 0.0;
  for (int q = -1; q <= max_lp_block(f.grid); ++q) {
    best = std::max(best, std::pow(2.0, q * s) * inverse(lp_project(fh, q)).sup());
  }
  return best;
}

double holder_modulus(const ScalarField& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("Holder exponent must lie in (0, 1)");
  const int n = f.grid.n();
  const RealArray& a = f.values;
  double best = 0.0;
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int m = 1; m <= n / 2; m *= 2) {
    for (const auto& d : dirs) {
      const double len = m * f.grid.spacing() * std::hypot(d[0], d[1]);
      double worst = 0.0;
      for (int r = 0; r < n; ++r) {
        const int rr = ((r + m * d[1]) % n + n) % n;
        for (int c = 0; c < n; ++c) {
          const int cc = (c + m * d[0]) % n;
          worst = std::max(worst, std::abs(a(rr, cc) - a(r, c)));
        }
      }
      best = std::max(best, worst / std::pow(len, s));
    }
  }
  return f.sup() + best;
}

double energy(const MHDState& state) {
  const DerivedFields d = derive_fields(state);
  const RealArray e = d.v.x.values.square() + d.v.y.values.square() + d.b.x.values.square() +
                      d.b.y.values.square();
  return 0.5 * sum_of(e) * state.grid().cell_area();
}

double gradient_sup(const Gradient& g) {
  RealArray s = g[0].values.square();
  for (int i = 1; i < 4; ++i) s += g[i].values.square();
  return std::sqrt(s.maxCoeff());
}

StationarityResidual stationarity_residual(const MHDState& state) {
  const auto [rw, rj] = rhs(state);
  const DerivedFields d = derive_fields(state);
  const RealArray gw = gradient(state.omega).magnitude();
  const RealArray gj = gradient(state.j).magnitude();
  const RealArray v = d.v.magnitude(), b = d.b.magnitude();
  const RealArray s = 2.0 * bilinear_h(d.grad_v, d.grad_b).values.abs();
  StationarityResidual out;
  out.l2_omega = lp_norm(rw, 2.0);
  out.l2_j = lp_norm(rj, 2.0);
  out.sup_omega = rw.sup();
  out.sup_j = rj.sup();
  const double scale_w = rms(v * gw + b * gj);
  const double scale_j = rms(b * gw + v * gj + s);
  const double n2 = static_cast<double>(state.grid().n()) * state.grid().n();
  const double area = state.grid().cell_area() * n2;
  double rel = 0.0;
  if (scale_w > 0.0) rel = std::max(rel, out.l2_omega / std::sqrt(area) / scale_w);
  if (scale_j > 0.0) rel = std::max(rel, out.l2_j / std::sqrt(area) / scale_j);
  out.relative = rel;
  return out;
}

ConormalNorms conormal_norms(const VectorField& X, const MHDState& state, double p) {
  ConormalNorms out;
  out.dx_omega = lp_norm(conormal(X, state.omega), p);
  out.dx_j = lp_norm(conormal(X, state.j), p);
  const double inf = std::numeric_limits<double>::infinity();
  out.wpx_omega = std::max(lp_norm(state.omega, 1.0), lp_norm(state.omega, inf)) + out.dx_omega;
  out.wpx_j = std::max(lp_norm(state.j, 1.0), lp_norm(state.j, inf)) + out.dx_j;
  return out;
}

DiagnosticsRecord basic_record(const MHDState& state, double p, double holder_s) {
  const double inf = std::numeric_limits<double>::infinity();
  DiagnosticsRecord r;
  r.t = state.time;
  r.p = p;
  r.omega_l1 = lp_norm(state.omega, 1.0);
  r.omega_l2 = lp_norm(state.omega, 2.0);
  r.omega_lp = lp_norm(state.omega, p);
  r.omega_linf = lp_norm(state.omega, inf);
  r.j_l1 = lp_norm(state.j, 1.0);
  r.j_l2 = lp_norm(state.j, 2.0);
  r.j_lp = lp_norm(state.j, p);
  r.j_linf = lp_norm(state.j, inf);
  r.energy = energy(state);
  const DerivedFields d = derive_fields(state);
  r.grad_v_sup = gradient_sup(d.grad_v);
  r.grad_b_sup = gradient_sup(d.grad_b);
  r.grad_sup = r.grad_v_sup + r.grad_b_sup;
  const StationarityResidual res = stationarity_residual(state);
  r.residual_l2_omega = res.l2_omega;
  r.residual_l2_j = res.l2_j;
  r.residual_relative = res.relative;
  r.holder_omega = holder_norm(state.omega, holder_s);
  r.holder_j = holder_norm(state.j, holder_s);
  return r;
}

std::string csv_header() {
  return "t,p,omega_l1,omega_l2,omega_lp,omega_linf,j_l1,j_l2,j_lp,j_linf,energy,"
         "grad_v_sup,grad_b_sup,grad_sup,residual_l2_omega,residual_l2_j,residual_relative,"
         "tangency,frozen_in,conormal_omega,conormal_j,holder_omega,holder_j";
}

std::string csv_row(const DiagnosticsRecord& r) {
  const double cols[] = {r.t,          r.p,          r.omega_l1,   r.omega_l2,
                         r.omega_lp,   r.omega_linf, r.j_l1,       r.j_l2,
                         r.j_lp,       r.j_linf,     r.energy,     r.grad_v_sup,
                         r.grad_b_sup, r.grad_sup,   r.residual_l2_omega, r.residual_l2_j,
                         r.residual_relative, r.tangency, r.frozen_in, r.conormal_omega,
                         r.conormal_j, r.holder_omega, r.holder_j};
  std::string out;
  for (size_t i = 0; i < std::size(cols); ++i) {
    if (i) out += ',';
    out += format_double(cols[i]);
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << csv_header() << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

AprioriReport apriori_envelope(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("apriori_envelope needs at least one record");
  for (size_t k = 1; k < records.size(); ++k) {
    if (!(records[k].t > records[k - 1].t)) throw std::invalid_argument("record times must increase");
  }
  const DiagnosticsRecord& r0 = records.front();
  const double np0 = r0.omega_lp + r0.j_lp;
  const double ninf0 = r0.omega_linf + r0.j_linf;
  const double n10 = r0.omega_l1 + r0.j_l1;
  const double n20 = r0.omega_l2 + r0.j_l2;

  AprioriReport out;
  out.p = r0.p;
  out.c_lp = out.c_linf = out.c_l1 = 1.0;
  double I = 0.0, J = 0.0;
  for (size_t k = 0; k < records.size(); ++k) {
    const DiagnosticsRecord& r = records[k];
    if (k > 0) {
      const DiagnosticsRecord& q = records[k - 1];
      const double dt = r.t - q.t;
      I += 0.5 * dt * (r.grad_v_sup + q.grad_v_sup);
      J += 0.5 * dt * (r.grad_v_sup * r.grad_b_sup + q.grad_v_sup * q.grad_b_sup);
    }
    const double t = r.t - r0.t;
    if (np0 > 0.0) {
      const double target = std::log((r.omega_lp + r.j_lp) / np0);
      out.c_lp = std::max(out.c_lp, smallest_constant([&](double C) { return std::log(C) + C * I - target; }));
    }
    if (ninf0 > 0.0) out.c_linf = std::max(out.c_linf, (r.omega_linf + r.j_linf - J) / ninf0);
    if (n10 > 0.0) {
      const double n1 = r.omega_l1 + r.j_l1;
      out.c_l1 = std::max(out.c_l1, smallest_constant([&](double C) {
                            return C * n10 + C * n20 * n20 * t * std::exp(C * I) - n1;
                          }));
    }
  }
  return out;
}

double envelope_drift(const AprioriReport& coarse, const AprioriReport& fine) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
  return std::max({rel(coarse.c_lp, fine.c_lp), rel(coarse.c_linf, fine.c_linf), rel(coarse.c_l1, fine.c_l1)});
}

}  // namespace mhd
