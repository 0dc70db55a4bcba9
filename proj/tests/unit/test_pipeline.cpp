#include <cmath>
#include <vector>

#include "doctest.h"

#include "anovacheb/errors.hpp"
#include "anovacheb/index_set.hpp"
#include "anovacheb/model.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/pipeline.hpp"
#include "anovacheb/rng.hpp"
#include "anovacheb/sensitivity.hpp"
#include "anovacheb/solver.hpp"
#include "anovacheb/term_set.hpp"
#include "anovacheb/testbench.hpp"
#include "oracles.hpp"

using namespace anovacheb;

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("initial fit recovers in-span coefficients on Chebyshev nodes") {
  const int d = 3;
  SplitMix64 rng(31415);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(d, 150, rng);
  const GroupedIndexSet set = build_grouped_index_set_by_order(
      build_superposition_term_set(d, 2), {5, 3});
  REQUIRE(set.size() == 25);
  const std::vector<double> truth = oracle::random_vector(set.size(), rng);
  data.values = oracle::matvec(oracle::dense_matrix(set, data.nodes), 150,
                               set.size(), truth);

  FitOptions opts;
  opts.lsqr.rel_tolerance = 1e-12;
  opts.lsqr.max_iterations = 2000;
  const FitReport report = fit_initial(data, 2, {5, 3}, opts);
  CHECK(report.model.index_set.term_set.terms == set.term_set.terms);
  CHECK(report.model.index_set.bandlimits == set.bandlimits);
  CHECK(report.model.density == NodeDensity::ChebyshevProduct);
  CHECK(report.model.theta == 0.0);
  CHECK(report.model.note == "initial fit");
  CHECK(report.model.converged);
  CHECK_FALSE(report.underdetermined);
  CHECK_FALSE(report.size_advisory);
  CHECK(report.size_ratio ==
        doctest::Approx(25.0 * std::log(300.0) / 150.0).epsilon(1e-14));
  CHECK(oracle::max_abs_diff(report.model.coefficients, truth) <= 1e-8);

  // The fitted model reproduces the in-span data.
  const std::vector<double> values =
      evaluate_model(report.model, data.nodes.coords, data.nodes.size());
  CHECK(oracle::max_abs_diff(values, data.values) <= 1e-8);
}

TEST_CASE("uniform data is rescaled and the model records theta") {
  const int d = 2;
  const double theta = 0.1;
  SplitMix64 rng(27182);
  Dataset data;
  data.nodes = sample_uniform_nodes(d, 200, rng);
  const AnovaTermSet terms = build_superposition_term_set(d, 2);
  const GroupedIndexSet set = build_grouped_index_set_by_order(terms, {6, 4});
  REQUIRE(set.size() == 20);
  const std::vector<double> truth = oracle::random_vector(set.size(), rng);
  // In-span values for the scaled-coordinate expansion the solver fits.
  const NodeSet scaled = scale_nodes(data.nodes, theta);
  data.values = oracle::matvec(oracle::dense_matrix(set, scaled),
                               data.nodes.size(), set.size(), truth);

  FitOptions opts;
  opts.theta = theta;
  opts.lsqr.rel_tolerance = 1e-12;
  opts.lsqr.max_iterations = 2000;
  const FitReport report =
      fit_term_set(data, terms, {6, 4}, opts, "uniform fit");
  CHECK(report.model.density == NodeDensity::Uniform);
  CHECK(report.model.theta == theta);
  CHECK(report.model.note == "uniform fit");
  CHECK(report.model.converged);
  CHECK(oracle::max_abs_diff(report.model.coefficients, truth) <= 1e-7);

  // Evaluation takes raw points and applies the recorded scaling itself.
  const std::vector<double> values =
      evaluate_model(report.model, data.nodes.coords, data.nodes.size());
  CHECK(oracle::max_abs_diff(values, data.values) <= 1e-7);
}

TEST_CASE("oversized index sets raise the size advisory") {
  const int d = 3;
  SplitMix64 rng(999);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(d, 20, rng);
  data.values.assign(20, 1.0);

  const FitReport report = fit_initial(data, 2, {5, 3});
  CHECK(report.underdetermined);
  CHECK(report.size_advisory);
  CHECK(report.size_ratio ==
        doctest::Approx(25.0 * std::log(40.0) / 20.0).epsilon(1e-14));
}

TEST_CASE("refit annotates stages and enforces the order bound") {
  const int d = 3;
  SplitMix64 rng(424242);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(d, 100, rng);
  data.values = oracle::random_vector(100, rng);

  const AnovaTermSet active = make_term_set(d, {{1}, {3}});
  const FitReport plain = refit(data, active, {6});
  CHECK(plain.model.note == "refit");
  const FitReport staged = refit(data, active, {6}, {}, 1);
  CHECK(staged.model.note == "refit (detection stage order 1)");
  CHECK(staged.model.index_set.size() == 1 + 2 * 5);

  const AnovaTermSet wide = make_term_set(d, {{1}, {2}, {1, 2}});
  CHECK_THROWS_AS(refit(data, wide, {6, 4}, {}, 1), DataError);
  CHECK_NOTHROW(refit(data, wide, {6, 4}, {}, 2));
  CHECK_NOTHROW(refit(data, wide, {6, 4}, {}, 0));
}

TEST_CASE("model analysis matches the direct decomposition") {
  SplitMix64 rng(6060);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(2, 60, rng);
  data.values = oracle::random_vector(60, rng);
  const FitReport report = fit_initial(data, 1, {4});

  const SensitivityReport via_model = analyze_model(report.model);
  const SensitivityReport direct = global_sensitivity_indices(
      report.model.index_set, report.model.coefficients.data());
  CHECK(via_model.total_variance == direct.total_variance);
  CHECK(via_model.term_variance == direct.term_variance);
  CHECK(via_model.gsi == direct.gsi);

  ApproximationModel flat;
  flat.index_set = build_grouped_index_set(make_term_set(1, {{1}}), {1, 2});
  flat.coefficients = {3.0, 0.0};
  CHECK_THROWS_AS(analyze_model(flat), NumericError);
}

TEST_CASE("fits validate dimensions and stages") {
  SplitMix64 rng(11);
  Dataset data;
  data.nodes = sample_chebyshev_nodes(3, 30, rng);
  data.values.assign(30, 0.5);

  CHECK_THROWS_AS(fit_initial(data, 0, {4}), DataError);
  CHECK_THROWS_AS(fit_term_set(data, build_superposition_term_set(2, 1), {4}),
                  DataError);

  Dataset mismatched = data;
  mismatched.values.pop_back();
  CHECK_THROWS_AS(fit_initial(mismatched, 1, {4}), DataError);
}

TEST_SUITE_END();
