#include "anovacheb/fft.hpp"

#include <cassert>
#include <cmath>

namespace anovacheb::detail {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void fft_pow2(std::complex<double>* a, std::size_t n, bool inverse) {
  assert(n > 0 && (n & (n - 1)) == 0);
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void dct1(const double* x, double* y, std::size_t G,
          std::vector<std::complex<double>>& scratch) {
  assert(G >= 2 && (G & (G - 1)) == 0);
  const std::size_t n = 2 * G;
  scratch.assign(n, std::complex<double>(0.0, 0.0));
  scratch[0] = x[0];
  for (std::size_t k = 1; k < G; ++k) {
    scratch[k] = x[k];
    scratch[n - k] = x[k];
  }
  scratch[G] = x[G];
  fft_pow2(scratch.data(), n, false);
  // For the even extension E_l = x_0 + (-1)^l x_G + 2 sum_{1<=k<G} x_k cos,
  // so the one-sided sum is (E_l + x_0 + (-1)^l x_G) / 2.
  const double x0 = x[0];
  const double xG = x[G];
  for (std::size_t l = 0; l <= G; ++l) {
    const double sign = (l & 1) ? -1.0 : 1.0;
    y[l] = 0.5 * (scratch[l].real() + x0 + sign * xG);
  }
}

}  // namespace anovacheb::detail
