#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "anovacheb/errors.hpp"
#include "anovacheb/index_set.hpp"
#include "anovacheb/model.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/rng.hpp"
#include "anovacheb/term_set.hpp"
#include "oracles.hpp"

using namespace anovacheb;

namespace {

ApproximationModel sample_model() {
  ApproximationModel m;
  m.index_set =
      build_grouped_index_set(make_term_set(2, {{1}, {2}, {1, 2}}), {1, 3, 2, 2});
  // Exercises the awkward corners of the float encoding: signed zero, the
  // smallest subnormal, a near-overflow magnitude and a non-terminating
  // binary fraction.
  m.coefficients = {0.5, -0.0, 5e-324, -1.0e308, 3.141592653589793};
  m.iterations = 17;
  m.converged = true;
  m.residual_norm = 0.1;
  m.note = "initial fit";
  return m;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("save/load round-trips bit for bit") {
  const ApproximationModel m = sample_model();
  std::ostringstream out;
  save_model(out, m);
  const std::string text = out.str();

  std::istringstream in(text);
  const ApproximationModel back = load_model(in);
  CHECK(back.index_set.term_set.d == 2);
  CHECK(back.index_set.term_set.terms == m.index_set.term_set.terms);
  CHECK(back.index_set.bandlimits == m.index_set.bandlimits);
  CHECK(back.index_set.offsets == m.index_set.offsets);
  CHECK(back.density == NodeDensity::ChebyshevProduct);
  CHECK(back.theta == 0.0);
  REQUIRE(back.coefficients.size() == m.coefficients.size());
  for (std::size_t i = 0; i < m.coefficients.size(); ++i) {
    CHECK(bits(back.coefficients[i]) == bits(m.coefficients[i]));
  }
  CHECK(std::signbit(back.coefficients[1]));
  CHECK(back.iterations == 17);
  CHECK(back.converged);
  CHECK(bits(back.residual_norm) == bits(0.1));
  CHECK(back.note == "initial fit");

  // Canonical form: re-saving the loaded model reproduces the bytes.
  std::ostringstream again;
  save_model(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("uniform models round-trip density and theta") {
  ApproximationModel m;
  m.index_set = build_grouped_index_set(make_term_set(1, {{1}}), {1, 4});
  m.coefficients = {0.25, -1.5, 0.1875, 0.5};
  m.density = NodeDensity::Uniform;
  m.theta = 0.3;

  std::ostringstream out;
  save_model(out, m);
  std::istringstream in(out.str());
  const ApproximationModel back = load_model(in);
  CHECK(back.density == NodeDensity::Uniform);
  CHECK(back.theta == 0.3);
  CHECK(back.note.empty());

  // The fit record is optional on input.
  nlohmann::json j = nlohmann::json::parse(out.str());
  j.erase("fit");
  std::istringstream bare_in(j.dump());
  const ApproximationModel bare = load_model(bare_in);
  CHECK(bare.iterations == 0);
  CHECK_FALSE(bare.converged);
  CHECK(bare.residual_norm == 0.0);
}

TEST_CASE("load rejects malformed input") {
  std::ostringstream out;
  save_model(out, sample_model());
  const nlohmann::json j = nlohmann::json::parse(out.str());

  const auto expect_data_error = [](nlohmann::json doc) {
    std::istringstream in(doc.dump());
    CHECK_THROWS_AS(load_model(in), DataError);
  };

  nlohmann::json bad = j;
  bad["format_version"] = "2";
  expect_data_error(bad);

  bad = j;
  bad.erase("theta");
  expect_data_error(bad);

  bad = j;
  bad.erase("coefficients");
  expect_data_error(bad);

  bad = j;
  bad.erase("bandlimits");
  expect_data_error(bad);

  bad = j;
  bad["coefficients"][0] = "zz";
  expect_data_error(bad);

  bad = j;
  bad["density"] = "gaussian";
  expect_data_error(bad);

  // One coefficient short of the index set.
  bad = j;
  bad["coefficients"].erase(0);
  expect_data_error(bad);

  std::istringstream garbage("not json at all");
  CHECK_THROWS_AS(load_model(garbage), DataError);
  std::istringstream scalar("42");
  CHECK_THROWS_AS(load_model(scalar), DataError);
}

TEST_CASE("load cap bounds the coefficient count") {
  nlohmann::json j;
  j["format_version"] = "1";
  j["dimension"] = 2;
  j["terms"] = nlohmann::json::array(
      {nlohmann::json::array(), nlohmann::json::array({1, 2})});
  j["density"] = "chebyshev";
  j["theta"] = 0.0;
  j["bandlimits"] = {1, 3300};
  j["coefficients"] = nlohmann::json::array();
  std::istringstream in(j.dump());
  CHECK_THROWS_AS(load_model(in), ResourceError);
}

TEST_CASE("model validation enforces shape and scaling invariants") {
  ApproximationModel m = sample_model();
  m.coefficients.pop_back();
  CHECK_THROWS_AS(validate_model(m), DataError);

  m = sample_model();
  m.theta = 0.2;
  CHECK_THROWS_AS(validate_model(m), DataError);

  m = sample_model();
  m.density = NodeDensity::Uniform;
  CHECK_THROWS_AS(validate_model(m), DataError);
  m.theta = 1.0;
  CHECK_THROWS_AS(validate_model(m), DataError);
  m.theta = 0.25;
  CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("evaluation rescales uniform models") {
  ApproximationModel m;
  m.index_set = build_grouped_index_set(make_term_set(1, {{1}}), {1, 2});
  m.coefficients = {1.0, 2.0};

  // Chebyshev-density model: value is 1 + 2 sqrt(2) x.
  const std::vector<double> pts = {0.8, -1.0, 0.0};
  const std::vector<double> plain = evaluate_model(m, pts, 3);
  CHECK(plain[0] == doctest::Approx(1.0 + 1.6 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(plain[1] == doctest::Approx(1.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(plain[2] == doctest::Approx(1.0).epsilon(1e-14));

  // Uniform model with theta = 0.25: raw points are shrunk by 0.75 first.
  m.density = NodeDensity::Uniform;
  m.theta = 0.25;
  const std::vector<double> scaled = evaluate_model(m, pts, 3);
  CHECK(scaled[0] == doctest::Approx(1.0 + 1.2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(scaled[1] == doctest::Approx(1.0 - 1.5 * std::sqrt(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(evaluate_model(m, pts, 2), DataError);
}

TEST_CASE("evaluation agrees with the dense basis oracle") {
  ApproximationModel m;
  m.index_set = build_grouped_index_set_by_order(
      build_superposition_term_set(2, 2), {5, 4});
  SplitMix64 rng(8181);
  m.coefficients = oracle::random_vector(m.index_set.size(), rng);

  NodeSet nodes;
  nodes.d = 2;
  nodes.density = NodeDensity::ChebyshevProduct;
  nodes.coords = oracle::random_vector(2 * 20, rng);

  const std::vector<double> want =
      oracle::matvec(oracle::dense_matrix(m.index_set, nodes), 20,
                     m.index_set.size(), m.coefficients);
  const std::vector<double> got = evaluate_model(m, nodes.coords, 20);
  CHECK(oracle::max_abs_diff(got, want) <= 1e-12);
}

TEST_SUITE_END();
