#pragma once

#include <cmath>
#include <cstdint>

namespace anovacheb {

/// SplitMix64: the state is a plain counter advanced by a fixed increment
/// and each output is a finalizer of the counter alone, so streams seeded
/// as seed + r for repetition r are independent of evaluation order and
/// thread placement.  Reference: Steele, Lea, Flood, "Fast splittable
/// pseudorandom number generators" (the java.util.SplittableRandom mixer).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0,1); the zero mantissa (probability
  /// 2^-53) is displaced by half an ulp so arccos/log stay regular.
  double uniform_open() {
    double u = uniform();
    return u > 0.0 ? u : 0x1.0p-54;
  }

  /// Standard normal via Box-Muller.  The spare value is cached, so a
  /// stream of gaussians consumes one uniform pair per two outputs.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace anovacheb
