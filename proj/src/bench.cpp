#include "mhdlab/bench.hpp"

#include "mhdlab/diagnostics.hpp"
#include "mhdlab/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mhd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGrowthLimit = 1.10;

std::uint64_t mode_key(std::uint64_t seed, int member, int role, int k1, int k2) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(member));
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k1)));
  return mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k2)));
}

double conjugate_exponent(double b) {
  if (std::isinf(b)) return 1.0;
  if (b == 1.0) return kInf;
  return b / (b - 1.0);
}

void check_grid(const Grid& g) {
  if (std::abs(g.length() - 2.0 * std::numbers::pi) > 1e-12) {
    throw std::invalid_argument("estimate bench works on the 2pi-periodic box");
  }
}

double ratio_of(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : kInf;
}

SizeStats stats_of(int n, std::vector<double> r) {
  SizeStats s;
  s.n = n;
  if (r.empty()) return s;
  std::sort(r.begin(), r.end());
  s.min = r.front();
  s.max = r.back();
  const size_t m = r.size() / 2;
  s.median = r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
  return s;
}

std::vector<SizeStats> stats_by_size(const std::vector<int>& sizes, const std::vector<RatioSample>& samples) {
  std::vector<SizeStats> out;
  for (int n : sizes) {
    std::vector<double> r;
    for (const auto& s : samples) {
      if (s.n == n) r.push_back(s.ratio);
    }
    out.push_back(stats_of(n, std::move(r)));
  }
  return out;
}

ScalarField convolve(const ScalarField& h, const ScalarField& f) {
  Spectrum a = forward(h);
  const Spectrum b = forward(f);
  a.coeffs *= b.coeffs;
  a.coeffs *= f.grid.cell_area();
  return inverse(a);
}

void check_ensemble(const Ensemble& ens) {
  if (ens.count < 1) throw std::invalid_argument("ensemble needs at least one member");
  if (ens.sizes.empty()) throw std::invalid_argument("ensemble needs at least one grid size");
  for (int n : ens.sizes) Grid(n, 2.0 * std::numbers::pi);
}

// Evaluates fn(grid, member) -> ratios for every size and member; member
// slots keep the sample order independent of the worker count.
template <typename Fn>
std::vector<RatioSample> sweep(const Ensemble& ens, int jobs, Fn&& fn) {
  check_ensemble(ens);
  std::vector<RatioSample> out;
  for (int n : ens.sizes) {
    const Grid g(n, 2.0 * std::numbers::pi);
    std::vector<std::vector<RatioSample>> slots(static_cast<size_t>(ens.count));
    parallel_for(slots.size(), jobs, [&](size_t m) { slots[m] = fn(g, static_cast<int>(m)); });
    for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

double holder_exponent_check(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("Holder exponent must lie in (0, 1)");
  return eps;
}

}  // namespace

void add_mode(Spectrum& s, int k1, int k2, std::complex<double> c) {
  const int n = s.grid.n();
  auto row = [n](int k) { return ((k % n) + n) % n; };
  if (k1 < 0 || (k1 == 0 && k2 < 0)) {
    k1 = -k1;
    k2 = -k2;
    c = std::conj(c);
  }
  if (k1 > n / 2) throw std::invalid_argument("mode outside the grid");
  s.coeffs(row(k2), k1) += c;
  // The k1 = 0 column stores both k2 and -k2 explicitly.
  if (k1 == 0 || k1 == n / 2) s.coeffs(row(-k2), k1) += std::conj(c);
}

ScalarField Ensemble::member(const Grid& g, int index, int role, double exponent_override) const {
  check_grid(g);
  const double expo = exponent_override > 0.0 ? exponent_override : exponent;
  const int kmax = g.n() / 4;
  const double n2 = static_cast<double>(g.n()) * g.n();
  Spectrum s(g);
  for (int k2 = 0; k2 <= kmax; ++k2) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;  // one representative of +-k
      const double k = std::hypot(k1, k2);
      if (k < 1.0 || k > kmax) continue;
      const double amp = std::pow(1.0 + k, -expo);
      const double theta = 2.0 * std::numbers::pi * unit_random(mode_key(seed, index, role, k1, k2));
      add_mode(s, k1, k2, 0.5 * n2 * amp * std::polar(1.0, theta));
    }
  }
  return inverse(s);
}

void summarize(RatioReport& rep) {
  std::vector<int> sizes;
  for (const auto& s : rep.samples) {
    if (!(s.ratio >= 0.0) || !std::isfinite(s.ratio)) {
      throw std::runtime_error(rep.lemma + ": ratio is negative or not finite");
    }
    if (std::find(sizes.begin(), sizes.end(), s.n) == sizes.end()) sizes.push_back(s.n);
  }
  std::sort(sizes.begin(), sizes.end());
  rep.sizes = stats_by_size(sizes, rep.samples);
  if (!rep.lower_samples.empty()) rep.lower = stats_by_size(sizes, rep.lower_samples);
  rep.growth.clear();
  rep.stable = true;
  for (size_t i = 1; i < rep.sizes.size(); ++i) {
    const double gr = ratio_of(rep.sizes[i].max, rep.sizes[i - 1].max);
    rep.growth.push_back(gr);
    if (!(gr <= kGrowthLimit)) rep.stable = false;
  }
  for (size_t i = 1; i < rep.lower.size(); ++i) {
    if (!(ratio_of(rep.lower[i].max, rep.lower[i - 1].max) <= kGrowthLimit)) rep.stable = false;
  }
}

double bernstein_ratio(const ScalarField& u, int q, int k, double a, double b, bool lower) {
  if (k < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (q < 0) throw std::invalid_argument("Bernstein ratios use annulus blocks q >= 0");
  const Spectrum block = lp_project(forward(u), q);
  const double base = lp_norm(inverse(block), a);
  double top = 0.0;
  const double norm_exp = lower ? a : b;
  for (int i = 0; i <= k; ++i) {
    // d1^i d2^(k-i)
    Spectrum d = block;
    for (int m = 0; m < i; ++m) d = derivative(std::move(d), 1);
    for (int m = 0; m < k - i; ++m) d = derivative(std::move(d), 2);
    top = std::max(top, lp_norm(inverse(d), norm_exp));
  }
  if (lower) return ratio_of(std::ldexp(1.0, q * k) * base, top);
  const double ia = std::isinf(a) ? 0.0 : 1.0 / a;
  const double ib = std::isinf(b) ? 0.0 : 1.0 / b;
  return ratio_of(top, std::pow(2.0, q * (k + 2.0 * (ia - ib))) * base);
}

ScalarField bump_kernel(const Grid& g, double rho) {
  if (!(rho > 0.0) || rho >= 0.5 * g.length()) throw std::invalid_argument("bump radius out of range");
  ScalarField h = ScalarField::sample(g, [&](double x1, double x2) {
    const double r = std::hypot(wrap_displacement(x1, g.length()), wrap_displacement(x2, g.length())) / rho;
    return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  });
  const double mass = h.values.sum() * g.cell_area();
  if (!(mass > 0.0)) throw std::invalid_argument("bump radius below grid resolution");
  h.values /= mass;
  return h;
}

double convolution_commutator_lhs(double rho, const ScalarField& f, const ScalarField& g, double a) {
  f.check_same(g);
  const ScalarField h = bump_kernel(f.grid, rho);
  const ScalarField lhs = convolve(h, product(f, g)) - product(f, convolve(h, g));
  return lp_norm(lhs, a);
}

double convolution_commutator(double rho, const ScalarField& f, const ScalarField& g, double a, double b) {
  const double bp = conjugate_exponent(b);
  if (!(a >= bp)) throw std::invalid_argument("convolution commutator needs a >= b'");
  const Grid& grid = f.grid;
  const ScalarField h = bump_kernel(grid, rho);
  const ScalarField xh = ScalarField::sample(grid, [&](double x1, double x2) {
    return std::hypot(wrap_displacement(x1, grid.length()), wrap_displacement(x2, grid.length()));
  });
  const double kernel = lp_norm(product(xh, h), bp);
  const VectorField df = gradient(f);
  const double grad = lp_norm(ScalarField(grid, df.magnitude()), a);
  return ratio_of(convolution_commutator_lhs(rho, f, g, a), kernel * grad * lp_norm(g, b));
}

ScalarField calderon_lp_commutator(const ScalarField& f, const ScalarField& g, int i, int j, int k) {
  f.check_same(g);
  const ScalarField dg = derivative(g, k);
  return riesz(product(f, dg), i, j) - product(f, riesz(dg, i, j));
}

double calderon_lp_ratio(const ScalarField& f, const ScalarField& g, int i, int j, int k, double p) {
  const double num = lp_norm(calderon_lp_commutator(f, g, i, j, k), p);
  const double grad = gradient(f).sup();
  return ratio_of(num, grad * lp_norm(g, p));
}

ScalarField calderon_holder_commutator(const ScalarField& f, const ScalarField& g, int i, int j) {
  f.check_same(g);
  return riesz(product(f, g), i, j) - product(f, riesz(g, i, j));
}

double calderon_holder_ratio(const ScalarField& f, const ScalarField& g, int i, int j, double eps, double p) {
  holder_exponent_check(eps);
  if (!(p >= 2.0 / (1.0 - eps))) throw std::invalid_argument("Holder commutator needs p >= 2/(1-eps)");
  const double num = holder_norm(calderon_holder_commutator(f, g, i, j), eps);
  const double fn = f.sup() + gradient(f).sup();
  return ratio_of(num, fn * lp_norm(g, p));
}

ScalarField transport_commutator(const VectorField& v, const ScalarField& rho, int i) {
  v.x.check_same(rho);
  if (i != 1 && i != 2) throw std::invalid_argument("axis must be 1 or 2");
  auto L = [i](const ScalarField& s) { return derivative(inverse_laplacian(s), i); };
  auto transport = [&v](const ScalarField& s) {
    const VectorField gs = gradient(s);
    return product(v.x, gs.x) + product(v.y, gs.y);
  };
  return L(transport(rho)) - transport(L(rho));
}

double transport_commutator_ratio(const VectorField& v, const ScalarField& rho, int i, double eps, double p) {
  holder_exponent_check(eps);
  const double num = holder_norm(transport_commutator(v, rho, i), eps);
  const double vn = std::max(holder_norm(v.x, eps), holder_norm(v.y, eps));
  const double rn = std::max(rho.sup(), lp_norm(rho, p));
  return ratio_of(num, vn * rn);
}

RatioReport bernstein_ratios(const Ensemble& ens, int k, double a, double b, int jobs) {
  RatioReport rep;
  rep.lemma = "lb";
  std::vector<RatioSample> lower;
  check_ensemble(ens);
  for (int n : ens.sizes) {
    const Grid g(n, 2.0 * std::numbers::pi);
    std::vector<std::vector<RatioSample>> up(static_cast<size_t>(ens.count)), lo(up.size());
    parallel_for(up.size(), jobs, [&](size_t m) {
      const ScalarField u = ens.member(g, static_cast<int>(m), 0);
      const double floor = 1e-10 * lp_norm(u, a);
      for (int q = 0; q <= max_lp_block(g); ++q) {
        if (lp_norm(lp_project(u, q), a) <= floor) continue;
        up[m].push_back({n, static_cast<int>(m), q, bernstein_ratio(u, q, k, a, b)});
        if (k > 0) lo[m].push_back({n, static_cast<int>(m), q, bernstein_ratio(u, q, k, a, a, true)});
      }
    });
    for (size_t m = 0; m < up.size(); ++m) {
      rep.samples.insert(rep.samples.end(), up[m].begin(), up[m].end());
      lower.insert(lower.end(), lo[m].begin(), lo[m].end());
    }
  }
  rep.lower_samples = std::move(lower);
  rep.notes.push_back("k=" + format_double(k) + " a=" + format_double(a) + " b=" + format_double(b));
  summarize(rep);
  return rep;
}

RatioReport convolution_ratios(const Ensemble& ens, double rho, double a, double b, int jobs) {
  RatioReport rep;
  rep.lemma = "ce";
  rep.samples = sweep(ens, jobs, [&](const Grid& g, int m) {
    const ScalarField f = ens.member(g, m, 0), h = ens.member(g, m, 1);
    return std::vector<RatioSample>{{g.n(), m, -2, convolution_commutator(rho, f, h, a, b)}};
  });
  rep.notes.push_back("rho=" + format_double(rho) + " a=" + format_double(a) + " b=" + format_double(b));
  summarize(rep);
  return rep;
}

RatioReport calderon_lp(const Ensemble& ens, int i, int j, int k, double p, int jobs) {
  RatioReport rep;
  rep.lemma = "cald1";
  rep.samples = sweep(ens, jobs, [&](const Grid& g, int m) {
    const ScalarField f = ens.member(g, m, 0), h = ens.member(g, m, 1);
    return std::vector<RatioSample>{{g.n(), m, -2, calderon_lp_ratio(f, h, i, j, k, p)}};
  });
  rep.notes.push_back("i=" + std::to_string(i) + " j=" + std::to_string(j) + " k=" + std::to_string(k) +
                      " p=" + format_double(p));
  summarize(rep);
  return rep;
}

RatioReport calderon_holder(const Ensemble& ens, int i, int j, double eps, double p, int jobs) {
  holder_exponent_check(eps);
  if (!(p >= 2.0 / (1.0 - eps))) throw std::invalid_argument("Holder commutator needs p >= 2/(1-eps)");
  RatioReport rep;
  rep.lemma = "cald2";
  rep.samples = sweep(ens, jobs, [&](const Grid& g, int m) {
    const ScalarField f = ens.member(g, m, 0), h = ens.member(g, m, 1);
    return std::vector<RatioSample>{{g.n(), m, -2, calderon_holder_ratio(f, h, i, j, eps, p)}};
  });
  rep.notes.push_back("i=" + std::to_string(i) + " j=" + std::to_string(j) + " eps=" + format_double(eps) +
                      " p=" + format_double(p));
  rep.notes.push_back("the low block q=-1 holds only the mean on this box, so the |f|_inf term is rarely active");
  summarize(rep);
  return rep;
}

RatioReport transport_commutator_ratios(const Ensemble& ens, int i, double eps, double p, int jobs) {
  holder_exponent_check(eps);
  RatioReport rep;
  rep.lemma = "an1";
  rep.samples = sweep(ens, jobs, [&](const Grid& g, int m) {
    // Stream one power smoother than the default law so v follows it.
    const VectorField v = perp_gradient(ens.member(g, m, 2, ens.exponent + 1.0));
    const ScalarField rho = ens.member(g, m, 3);
    return std::vector<RatioSample>{{g.n(), m, -2, transport_commutator_ratio(v, rho, i, eps, p)}};
  });
  rep.notes.push_back("i=" + std::to_string(i) + " eps=" + format_double(eps) + " p=" + format_double(p));
  summarize(rep);
  return rep;
}

RatioReport run_lemma(const std::string& lemma, const Ensemble& ens, int jobs) {
  if (lemma == "lb") return bernstein_ratios(ens, 1, 2.0, kInf, jobs);
  if (lemma == "ce") return convolution_ratios(ens, 0.5, 2.0, 2.0, jobs);
  if (lemma == "cald1") return calderon_lp(ens, 1, 1, 2, 4.0, jobs);
  if (lemma == "cald2") return calderon_holder(ens, 1, 2, 0.5, 4.0, jobs);
  if (lemma == "an1") return transport_commutator_ratios(ens, 1, 0.5, 4.0, jobs);
  throw std::invalid_argument("unknown lemma '" + lemma + "' (expected lb, ce, cald1, cald2, an1)");
}

}  // namespace mhd
