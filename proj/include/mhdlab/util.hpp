#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace mhd {

/// Pairwise (fixed tree) summation; bit-identical regardless of who calls it.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results into per-index slots so the
/// reduction order stays fixed.
inline void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// splitmix64; used to derive per-mode random numbers from a seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_random(std::uint64_t key) {
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

namespace log {

using Sink = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: stderr). Returns the previous sink.
Sink set_warning_sink(Sink sink);
void warn(const std::string& message);

}  // namespace log

/// Formats with 17 significant digits.
std::string format_double(double x);

}  // namespace mhd
