#pragma once

#include <cstddef>

namespace anovacheb {

/// Pairwise (cascade) sum of n doubles.  Error grows like log n rather
/// than n, and the reduction tree depends only on n, so results are
/// reproducible for a fixed input order.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

/// Pairwise dot product with the same fixed reduction tree.
inline double pairwise_dot(const double* a, const double* b, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_dot(a, b, half) + pairwise_dot(a + half, b + half, n - half);
}

}  // namespace anovacheb
