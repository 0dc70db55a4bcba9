#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace anovacheb::detail {

/// In-place iterative radix-2 FFT, length a power of two.  Forward sign
/// convention: X_l = sum_k x_k exp(-2 pi i k l / n).
void fft_pow2(std::complex<double>* a, std::size_t n, bool inverse = false);

/// Type-I discrete cosine transform of size G+1 (G a power of two):
///   y_l = sum_{k=0}^{G} x_k cos(pi k l / G),   l = 0..G,
/// evaluated through a length-2G FFT of the even extension.  The matrix is
/// symmetric, so the same routine implements the transpose.  `scratch` is
/// resized as needed; x and y may alias.
void dct1(const double* x, double* y, std::size_t G,
          std::vector<std::complex<double>>& scratch);

}  // namespace anovacheb::detail
