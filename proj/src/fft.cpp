#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace mhd::detail {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int cols = n / 2 + 1;
  double* real = fftw_alloc_real(static_cast<size_t>(n) * n);
  fftw_complex* cplx = fftw_alloc_complex(static_cast<size_t>(n) * cols);
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.r2c = fftw_plan_dft_r2c_2d(n, n, real, cplx, flags);
  p.c2r = fftw_plan_dft_c2r_2d(n, n, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW plan creation failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

void fft_r2c(int n, const double* in, std::complex<double>* out) {
  const Plans& p = plans_for(n);
  // r2c with out-of-place arrays leaves the input untouched.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void fft_c2r(int n, std::complex<double>* in, double* out) {
  const Plans& p = plans_for(n);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace mhd::detail
