#pragma once

#include "mhdlab/spectral.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mhd {

/// Deterministic random test functions on [0, 2pi)^2. Member fields are
///   f = sum_k A(|k|) cos(k . x + theta_k),  A = (1 + |k|)^-exponent,
/// over the half plane of wavevectors with 1 <= |k| <= n/4. Each phase is a
/// hash of (seed, member, role, k1, k2), so the same mode carries the same
/// phase at every grid size and the ensembles are nested across n.
struct Ensemble {
  std::uint64_t seed = 1;
  int count = 50;
  double exponent = 2.0;
  std::vector<int> sizes = {64, 128, 256};

  ScalarField member(const Grid& g, int index, int role, double exponent_override = 0.0) const;
};

/// Adds c e^{i k.x} + conj to a spectrum (k1, k2 signed integers). c is in
/// unnormalized DFT units, so a unit cosine needs c = n^2 / 2.
void add_mode(Spectrum& s, int k1, int k2, std::complex<double> c);

struct RatioSample {
  int n = 0;
  int member = 0;
  int block = -2;  // LP block for per-block ratios, -2 otherwise
  double ratio = 0.0;
};

struct SizeStats {
  int n = 0;
  double max = 0.0;
  double median = 0.0;
  double min = 0.0;
};

struct RatioReport {
  std::string lemma;
  std::vector<SizeStats> sizes;
  std::vector<double> growth;  // max ratio at n / max ratio at n/2
  std::vector<RatioSample> samples;
  // Reverse Bernstein ratios (lb only).
  std::vector<SizeStats> lower;
  std::vector<RatioSample> lower_samples;
  bool stable = false;         // every growth factor <= 1.10
  std::vector<std::string> notes;
};

/// Finishes a report from its samples: per-size stats, growth, verdict.
void summarize(RatioReport& rep);

// Single-pair measurements (all on the grid of the inputs).

/// sup_{|alpha|=k} |d^alpha Delta_q u|_b / (2^{q(k + 2(1/a - 1/b))} |Delta_q u|_a);
/// with lower = true, the reverse Bernstein ratio
/// 2^{qk} |Delta_q u|_a / sup_{|alpha|=k} |d^alpha Delta_q u|_a.
double bernstein_ratio(const ScalarField& u, int q, int k, double a, double b, bool lower = false);
/// |h*(fg) - f(h*g)|_a / (|x h|_{b'} |grad f|_a |g|_b), h a bump of radius rho.
double convolution_commutator(double rho, const ScalarField& f, const ScalarField& g, double a, double b);
/// Numerator of the above.
double convolution_commutator_lhs(double rho, const ScalarField& f, const ScalarField& g, double a);
/// |R_ij(f d_k g) - f R_ij(d_k g)|_p / (|grad f|_inf |g|_p).
double calderon_lp_ratio(const ScalarField& f, const ScalarField& g, int i, int j, int k, double p);
ScalarField calderon_lp_commutator(const ScalarField& f, const ScalarField& g, int i, int j, int k);
/// |R_ij(f g) - f R_ij g|_{C^eps} / ((|f|_inf + |grad f|_inf) |g|_p); p >= 2/(1-eps).
double calderon_holder_ratio(const ScalarField& f, const ScalarField& g, int i, int j, double eps, double p);
ScalarField calderon_holder_commutator(const ScalarField& f, const ScalarField& g, int i, int j);
/// |L(v . grad rho) - v . grad(L rho)|_{C^eps} / (|v|_{C^eps} |rho|_{L^inf cap L^p}),
/// L = d_i Lap^-1.
double transport_commutator_ratio(const VectorField& v, const ScalarField& rho, int i, double eps, double p);
ScalarField transport_commutator(const VectorField& v, const ScalarField& rho, int i);

/// Smooth radial bump of radius rho with unit integral, sampled on g.
ScalarField bump_kernel(const Grid& g, double rho);

// Ensemble sweeps.

RatioReport bernstein_ratios(const Ensemble& ens, int k, double a, double b, int jobs = 1);
RatioReport convolution_ratios(const Ensemble& ens, double rho, double a, double b, int jobs = 1);
RatioReport calderon_lp(const Ensemble& ens, int i, int j, int k, double p, int jobs = 1);
RatioReport calderon_holder(const Ensemble& ens, int i, int j, double eps, double p, int jobs = 1);
RatioReport transport_commutator_ratios(const Ensemble& ens, int i, double eps, double p, int jobs = 1);

/// Runs one lemma by name (lb, ce, cald1, cald2, an1) with default parameters.
RatioReport run_lemma(const std::string& lemma, const Ensemble& ens, int jobs = 1);

}  // namespace mhd
