#include <cmath>
#include <vector>

#include "doctest.h"

#include "../support/oracles.hpp"
#include "anovacheb/errors.hpp"
#include "anovacheb/lsqr.hpp"
#include "anovacheb/rng.hpp"

using namespace anovacheb;

namespace {

std::vector<double> random_matrix(std::size_t m, std::size_t n,
                                  std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> a(m * n);
  for (auto& v : a) v = 2.0 * rng.uniform() - 1.0;
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("lsqr");

TEST_CASE("overdetermined solutions match the singular-value oracle") {
  const std::size_t m = 50, n = 20;
  for (std::uint64_t seed : {101ULL, 102ULL, 103ULL, 104ULL, 105ULL}) {
    const auto a = random_matrix(m, n, seed);
    SplitMix64 rng(seed + 1000);
    const auto b = oracle::random_vector(m, rng);
    const oracle::DenseOperator op(a, m, n);
    LsqrConfig cfg;
    cfg.rel_tolerance = 1e-12;
    cfg.max_iterations = 500;
    const LsqrResult res = lsqr_solve(op, b, cfg);
    CHECK(res.converged);
    CHECK_FALSE(res.underdetermined);
    const auto ref = oracle::svd_lstsq(a, m, n, b);
    CHECK(oracle::rel_l2_diff(res.x, ref) <= 1e-8);
    // The reported residual matches the oracle's.
    const auto ax = oracle::matvec(a, m, n, res.x);
    double rr = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      rr += (b[j] - ax[j]) * (b[j] - ax[j]);
    CHECK(std::abs(res.residual_norm - std::sqrt(rr)) <=
          1e-6 * std::sqrt(rr));
  }
}

TEST_CASE("damping solves the augmented system") {
  const std::size_t m = 30, n = 12;
  const double lambda = 0.5;
  const auto a = random_matrix(m, n, 7);
  SplitMix64 rng(1007);
  const auto b = oracle::random_vector(m, rng);
  const oracle::DenseOperator op(a, m, n);
  LsqrConfig cfg;
  cfg.damping = lambda;
  cfg.rel_tolerance = 1e-12;
  const LsqrResult res = lsqr_solve(op, b, cfg);

  // Dense oracle on [A; lambda I] x ~ [b; 0].
  std::vector<double> aug((m + n) * n, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) aug[j * n + i] = a[j * n + i];
  for (std::size_t i = 0; i < n; ++i) aug[(m + i) * n + i] = lambda;
  std::vector<double> rhs(m + n, 0.0);
  for (std::size_t j = 0; j < m; ++j) rhs[j] = b[j];
  const auto ref = oracle::svd_lstsq(aug, m + n, n, rhs);
  CHECK(oracle::rel_l2_diff(res.x, ref) <= 1e-8);
}

TEST_CASE("zero right-hand side returns the zero solution at once") {
  const auto a = random_matrix(10, 4, 8);
  const oracle::DenseOperator op(a, 10, 4);
  const LsqrResult res = lsqr_solve(op, std::vector<double>(10, 0.0));
  CHECK(res.converged);
  CHECK(res.stop == LsqrStop::ZeroRhs);
  CHECK(res.iterations == 0);
  for (double x : res.x) CHECK(x == 0.0);
}

TEST_CASE("iteration cap reports non-convergence but a usable iterate") {
  const auto a = random_matrix(40, 25, 9);
  SplitMix64 rng(1009);
  const auto b = oracle::random_vector(40, rng);
  const oracle::DenseOperator op(a, 40, 25);
  LsqrConfig cfg;
  cfg.max_iterations = 2;
  const LsqrResult res = lsqr_solve(op, b, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.stop == LsqrStop::IterationLimit);
  CHECK(res.iterations == 2);
  for (double x : res.x) CHECK(std::isfinite(x));
}

TEST_CASE("a broken adjoint is caught by the consistency probe") {
  const auto a = random_matrix(12, 5, 10);
  const oracle::DenseOperator skewed(a, 12, 5, 1.0001);
  SplitMix64 rng(1010);
  const auto b = oracle::random_vector(12, rng);
  CHECK_THROWS_AS(lsqr_solve(skewed, b), NumericError);
}

TEST_CASE("underdetermined consistent systems are flagged and solved") {
  const std::size_t m = 10, n = 30;
  const auto a = random_matrix(m, n, 11);
  SplitMix64 rng(1011);
  const auto xstar = oracle::random_vector(n, rng);
  const auto b = oracle::matvec(a, m, n, xstar);
  const oracle::DenseOperator op(a, m, n);
  LsqrConfig cfg;
  cfg.rel_tolerance = 1e-12;
  const LsqrResult res = lsqr_solve(op, b, cfg);
  CHECK(res.underdetermined);
  CHECK(res.converged);
  const auto ax = oracle::matvec(a, m, n, res.x);
  CHECK(oracle::rel_l2_diff(ax, b) <= 1e-8);
  // LSQR converges to the minimum-norm solution, like the oracle.
  const auto ref = oracle::svd_lstsq(a, m, n, b);
  CHECK(oracle::rel_l2_diff(res.x, ref) <= 1e-6);
}

TEST_CASE("config validation") {
  const auto a = random_matrix(4, 2, 12);
  const oracle::DenseOperator op(a, 4, 2);
  const std::vector<double> b = {1.0, 2.0, 3.0, 4.0};
  LsqrConfig bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(lsqr_solve(op, b, bad), DataError);
  bad = {};
  bad.rel_tolerance = -1.0;
  CHECK_THROWS_AS(lsqr_solve(op, b, bad), DataError);
  bad = {};
  bad.damping = -0.5;
  CHECK_THROWS_AS(lsqr_solve(op, b, bad), DataError);
  CHECK_THROWS_AS(lsqr_solve(op, std::vector<double>(3, 1.0), {}), DataError);
}

TEST_SUITE_END();
