#pragma once

/// @file reference.hpp
/// @brief Plain serial implementations of the hot kernels.
///
/// These are the ground truth the OpenMP paths are tested against, and the
/// baseline for the benchmark tool. Keep them simple.

#include <cstddef>
#include <span>

namespace plate::reference {

inline double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// CSR matrix-vector product, one row at a time.
inline void spmv(std::span<const int> row_ptr, std::span<const int> col,
                 std::span<const double> val, std::span<const double> x,
                 std::span<double> y) {
  const std::size_t n = row_ptr.size() - 1;
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace plate::reference
