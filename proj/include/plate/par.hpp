#pragma once

/// @file par.hpp
/// @brief Deterministic parallel primitives.
///
/// Reductions are accumulated in fixed-size blocks so the summation order,
/// and therefore the result bytes, do not depend on the number of threads.
/// Serial twins of the hot kernels live in reference.hpp and are compared
/// against these in the unit tests and the benchmark tool.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plate::par {

inline constexpr std::size_t kChunk = 1024;

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Sum f(0) + ... + f(n-1) with block-deterministic ordering.
template <class F>
double sum_indexed(std::size_t n, F&& f) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

inline double sum(std::span<const double> v) {
  return sum_indexed(v.size(), [&](std::size_t i) { return v[i]; });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return sum_indexed(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    f(static_cast<std::size_t>(i));
}

}  // namespace plate::par
