#include <cmath>
#include <vector>

#include "doctest.h"

#include "../support/oracles.hpp"
#include "anovacheb/errors.hpp"
#include "anovacheb/index_set.hpp"
#include "anovacheb/rng.hpp"
#include "anovacheb/solver.hpp"
#include "anovacheb/term_set.hpp"
#include "anovacheb/testbench.hpp"

using namespace anovacheb;

namespace {

constexpr double kPi = 3.14159265358979323846;

NodeSet two_nodes() {
  NodeSet nodes;
  nodes.d = 2;
  nodes.density = NodeDensity::Uniform;
  nodes.coords = {0.0, 0.6, 0.28, -0.96};
  return nodes;
}

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("scale_nodes shrinks coordinates and stamps theta") {
  const NodeSet nodes = two_nodes();
  const NodeSet scaled = scale_nodes(nodes, 0.25);
  CHECK(scaled.theta == 0.25);
  CHECK(scaled.density == NodeDensity::Uniform);
  REQUIRE(scaled.coords.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(scaled.coords[i] == 0.75 * nodes.coords[i]);
  // The input set is untouched.
  CHECK(nodes.theta == 0.0);
  CHECK(nodes.coords[1] == 0.6);
}

TEST_CASE("scale_nodes rejects double scaling and bad padding") {
  const NodeSet nodes = two_nodes();
  const NodeSet scaled = scale_nodes(nodes, 0.25);
  CHECK_THROWS_AS(scale_nodes(scaled, 0.25), DataError);
  CHECK_THROWS_AS(scale_nodes(nodes, 0.0), DataError);
  CHECK_THROWS_AS(scale_nodes(nodes, 1.0), DataError);
  CHECK_THROWS_AS(scale_nodes(nodes, -0.1), DataError);
}

TEST_CASE("sqrt_density_weights against hand-evaluated densities") {
  const NodeSet nodes = two_nodes();
  const auto w = sqrt_density_weights(nodes);
  REQUIRE(w.size() == 2);
  // (0, 0.6): sqrt(1-x^2) factors are 1 and 0.8.
  CHECK(w[0] == doctest::Approx(std::sqrt(1.0 / (kPi * kPi * 0.8)))
                    .epsilon(1e-14));
  // (0.28, -0.96): factors are 0.96 and 0.28.
  CHECK(w[1] == doctest::Approx(std::sqrt(1.0 / (kPi * kPi * 0.96 * 0.28)))
                    .epsilon(1e-14));
}

TEST_CASE("chebyshev-node solve recovers in-span coefficients") {
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(3, 2), {8, 5});
  REQUIRE(set.size() == 1 + 3 * 7 + 3 * 16);
  SplitMix64 rng(4242);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(3, 350, rng);
  const auto h_true = oracle::random_vector(set.size(), rng);
  const auto a = oracle::dense_matrix(set, data.nodes);
  data.values = oracle::matvec(a, 350, set.size(), h_true);

  LsqrConfig cfg;
  cfg.rel_tolerance = 1e-12;
  cfg.max_iterations = 2000;
  const SolveResult res = solve_chebyshev_nodes(data, set, cfg);
  CHECK(res.converged);
  CHECK_FALSE(res.underdetermined);
  CHECK(oracle::max_abs_diff(res.coefficients, h_true) <= 1e-8);
}

TEST_CASE("uniform-node solve recovers coefficients over scaled coordinates") {
  const double theta = 0.1;
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(2, 2), {6, 4});
  REQUIRE(set.size() == 1 + 2 * 5 + 9);
  SplitMix64 rng(9090);
  Dataset data;
  data.nodes = sample_uniform_nodes(2, 300, rng);
  const auto h_true = oracle::random_vector(set.size(), rng);
  // The uniform path expands over the scaled coordinates, so build the
  // in-span values there.
  const NodeSet scaled = scale_nodes(data.nodes, theta);
  const auto a = oracle::dense_matrix(set, scaled);
  data.values = oracle::matvec(a, 300, set.size(), h_true);

  LsqrConfig cfg;
  cfg.rel_tolerance = 1e-12;
  cfg.max_iterations = 2000;
  const SolveResult res = solve_uniform_nodes(data, set, theta, cfg);
  CHECK(res.converged);
  CHECK(oracle::max_abs_diff(res.coefficients, h_true) <= 1e-8);
}

TEST_CASE("solver rejects datasets with the wrong density tag") {
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(2, 1), {4});
  SplitMix64 rng(11);
  Dataset cheb;
  cheb.nodes = sample_chebyshev_nodes(2, 30, rng);
  cheb.values.assign(30, 1.0);
  Dataset uni;
  uni.nodes = sample_uniform_nodes(2, 30, rng);
  uni.values.assign(30, 1.0);

  CHECK_THROWS_AS(solve_chebyshev_nodes(uni, set), DataError);
  CHECK_THROWS_AS(solve_uniform_nodes(cheb, set), DataError);

  // Already-scaled uniform nodes cannot be scaled again.
  Dataset scaled = uni;
  scaled.nodes = scale_nodes(uni.nodes, 0.1);
  CHECK_THROWS_AS(solve_uniform_nodes(scaled, set), DataError);
}

TEST_CASE("more columns than rows sets the underdetermined flag") {
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(2, 2), {6, 6});
  REQUIRE(set.size() == 36);
  SplitMix64 rng(77);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(2, 20, rng);
  data.values = oracle::random_vector(20, rng);
  const SolveResult res = solve_chebyshev_nodes(data, set);
  CHECK(res.underdetermined);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("spectral");

TEST_CASE("chebyshev-node singular values sit in the concentration band") {
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(9, 1), {12});
  REQUIRE(set.size() == 100);
  int inside = 0;
  for (int t = 0; t < 20; ++t) {
    SplitMix64 rng(682000 + t);
    const NodeSet nodes = sample_chebyshev_nodes(9, 2000, rng);
    const SpectralDiagnostic diag = spectral_diagnostic(nodes, set);
    CHECK(diag.rows == 2000);
    CHECK(diag.columns == 100);
    CHECK(diag.band_low == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(diag.band_high == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
    CHECK(diag.min_singular > 0.0);
    CHECK(diag.min_singular <= diag.max_singular);
    if (diag.inside_band) ++inside;
  }
  CHECK(inside == 20);
}

TEST_CASE("uniform-node diagnostic reports the inflated band") {
  const double theta = 0.10;
  const double delta = 0.5;
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(1, 1), {10});
  REQUIRE(set.size() == 10);

  // Band inflation restated from the stability statement: with
  // kappa = (2*theta - theta^2)^(d/2) / (2^ds * 48 * (sqrt(2) - log(delta)))
  // the widening is gamma = 4^ds * kappa * (arccos(1-theta)/pi)^d * M/log(2M).
  const int d = 1, ds = 1;
  const std::size_t m = 4000;
  const double kappa = std::pow(2.0 * theta - theta * theta, 0.5 * d) /
                       (std::pow(2.0, ds) * 48.0 *
                        (std::sqrt(2.0) - std::log(delta)));
  const double gamma = std::pow(4.0, ds) * kappa *
                       std::pow(std::acos(1.0 - theta) / kPi, d) *
                       static_cast<double>(m) /
                       std::log(2.0 * static_cast<double>(m));
  const double bound =
      kappa * static_cast<double>(m) / std::log(2.0 * static_cast<double>(m));

  int inside = 0;
  for (int t = 0; t < 20; ++t) {
    SplitMix64 rng(777000 + t);
    const NodeSet nodes = sample_uniform_nodes(d, m, rng);
    const SpectralDiagnostic diag = spectral_diagnostic(nodes, set, delta,
                                                        theta);
    CHECK(diag.kappa == doctest::Approx(kappa).epsilon(1e-12));
    CHECK(diag.gamma == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(diag.stability_bound == doctest::Approx(bound).epsilon(1e-12));
    // 10 columns exceed the desk-scale bound (~0.96): reported honestly.
    CHECK_FALSE(diag.stability_condition);
    // gamma > 1/2 clamps the lower edge to zero; the upper edge is live.
    CHECK(diag.band_low == 0.0);
    CHECK(diag.band_high ==
          doctest::Approx(std::sqrt(1.5 + gamma)).epsilon(1e-12));
    if (diag.inside_band) ++inside;
  }
  CHECK(gamma == doctest::Approx(0.5506997746).epsilon(1e-9));
  CHECK(inside == 20);
}

TEST_CASE("diagnostic guards its inputs and its size") {
  const auto set = build_grouped_index_set_by_order(
      build_superposition_term_set(9, 1), {12});
  SplitMix64 rng(682000);
  const NodeSet nodes = sample_chebyshev_nodes(9, 200, rng);
  CHECK_THROWS_AS(spectral_diagnostic(nodes, set, 0.5, kDefaultTheta, 50),
                  ResourceError);
  CHECK_THROWS_AS(spectral_diagnostic(nodes, set, 0.0), DataError);
  CHECK_THROWS_AS(spectral_diagnostic(nodes, set, 1.0), DataError);

  const auto set2 = build_grouped_index_set_by_order(
      build_superposition_term_set(2, 1), {4});
  CHECK_THROWS_AS(spectral_diagnostic(nodes, set2), DataError);
}

TEST_SUITE_END();
