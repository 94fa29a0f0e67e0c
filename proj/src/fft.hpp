#pragma once

#include <complex>

namespace mhd::detail {

// Thin wrapper over cached FFTW plans. Plans are created once per size under a
// lock and executed through the new-array interface, which is thread safe.
void fft_r2c(int n, const double* in, std::complex<double>* out);
// Destroys `in`.
void fft_c2r(int n, std::complex<double>* in, double* out);

}  // namespace mhd::detail
