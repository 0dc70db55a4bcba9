#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "anovacheb/rng.hpp"
#include "anovacheb/summation.hpp"

using namespace anovacheb;

TEST_SUITE_BEGIN("rng");

TEST_CASE("generator reproduces the published reference stream") {
  // First outputs of the reference splitmix64 stream for two seeds.
  SplitMix64 a(0);
  CHECK(a.next() == 0xe220a8397b1dcdafULL);
  CHECK(a.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(a.next() == 0x06c45d188009454fULL);
  SplitMix64 b(1234567);
  CHECK(b.next() == 0x599ed017fb08fc85ULL);
  CHECK(b.next() == 0x2c73f08458540fa5ULL);
  CHECK(b.next() == 0x883ebce5a3f27c77ULL);
}

TEST_CASE("uniform doubles are the top 53 bits, frozen for one seed") {
  SplitMix64 rng(42);
  CHECK(rng.uniform() == 0x1.7bae644c5fd6dp-1);
  CHECK(rng.uniform() == 0x1.477f199d93378p-3);
}

TEST_CASE("uniform stays in [0,1) and uniform_open in (0,1)") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  SplitMix64 rng2(2025);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng2.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian moments match a standard normal") {
  SplitMix64 rng(9001);
  const std::size_t n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform sample passes a Kolmogorov-Smirnov check") {
  SplitMix64 rng(31337);
  const std::size_t n = 20000;
  std::vector<double> u(n);
  for (auto& x : u) x = rng.uniform();
  std::sort(u.begin(), u.end());
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dmax = std::max(dmax, std::abs(u[i] - (i + 1.0) / n));
    dmax = std::max(dmax, std::abs(u[i] - static_cast<double>(i) / n));
  }
  // 1.95/sqrt(n) is the alpha ~ 0.001 critical value; the seed is fixed,
  // so this never flakes.
  CHECK(dmax * std::sqrt(static_cast<double>(n)) < 1.95);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("summation");

TEST_CASE("pairwise sum of integers is exact") {
  const std::size_t n = 1 << 20;
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  const double expect = 0.5 * static_cast<double>(n) * (n + 1.0);
  CHECK(pairwise_sum(v.data(), n) == expect);
}

TEST_CASE("pairwise sum tracks a long-double reference on noisy data") {
  SplitMix64 rng(7);
  std::vector<double> v(100001);
  for (auto& x : v) x = rng.uniform() - 0.5;
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x);
  const double expect = static_cast<double>(acc);
  const double got = pairwise_sum(v.data(), v.size());
  CHECK(std::abs(got - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
}

TEST_CASE("pairwise dot matches a long-double reference") {
  SplitMix64 rng(8);
  std::vector<double> a(4097), b(4097);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = 2.0 * rng.uniform() - 1.0;
    b[i] = 2.0 * rng.uniform() - 1.0;
  }
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<long double>(a[i]) * b[i];
  const double got = pairwise_dot(a.data(), b.data(), a.size());
  CHECK(std::abs(got - static_cast<double>(acc)) <= 1e-13 * a.size());
}

TEST_CASE("empty and tiny inputs") {
  std::vector<double> v = {3.5};
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
  CHECK(pairwise_sum(v.data(), 1) == 3.5);
  CHECK(pairwise_dot(v.data(), v.data(), 1) == 12.25);
}

TEST_SUITE_END();
