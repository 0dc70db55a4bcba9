#include "anovacheb/model.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "anovacheb/errors.hpp"
#include "anovacheb/transform.hpp"

namespace anovacheb {

namespace {

// Load cap: a model file is a fit result, not a bulk container.
constexpr std::size_t kMaxCoefficients = 10'000'000;

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex_double(const std::string& text, const std::string& source) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw DataError(source + ": malformed float literal '" + text + "'");
  }
  return v;
}

const nlohmann::json& require_field(const nlohmann::json& j,
                                    const std::string& key,
                                    const std::string& source) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(source + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

void validate_model(const ApproximationModel& model) {
  validate_term_set(model.index_set.term_set);
  if (model.coefficients.size() != model.index_set.size()) {
    throw DataError("coefficient count does not match the index set");
  }
  if (model.density == NodeDensity::ChebyshevProduct) {
    if (model.theta != 0.0) {
      throw DataError("Chebyshev-density models carry no rescaling");
    }
  } else if (!(model.theta > 0.0 && model.theta < 1.0)) {
    throw DataError("uniform models need theta in (0,1)");
  }
}

void save_model(std::ostream& out, const ApproximationModel& model) {
  validate_model(model);
  nlohmann::json j;
  j["format_version"] = "1";
  j["dimension"] = model.index_set.term_set.d;
  j["density"] =
      model.density == NodeDensity::ChebyshevProduct ? "chebyshev" : "uniform";
  j["theta"] = model.theta;
  j["terms"] = model.index_set.term_set.terms;
  j["bandlimits"] = model.index_set.bandlimits;
  nlohmann::json coeffs = nlohmann::json::array();
  for (double c : model.coefficients) coeffs.push_back(hex_double(c));
  j["coefficients"] = std::move(coeffs);
  j["fit"] = {{"iterations", model.iterations},
              {"converged", model.converged},
              {"residual_norm", hex_double(model.residual_norm)}};
  if (!model.note.empty()) j["note"] = model.note;
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed to write model");
}

void save_model_file(const std::string& path, const ApproximationModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_model(out, model);
}

ApproximationModel load_model(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(source + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(source + ": expected a JSON object");

  const auto& version = require_field(j, "format_version", source);
  if (!version.is_string() || version.get<std::string>() != "1") {
    throw DataError(source + ": unsupported model format version");
  }

  ApproximationModel model;
  AnovaTermSet term_set;
  try {
    term_set.d = require_field(j, "dimension", source).get<int>();
    term_set.terms = require_field(j, "terms", source).get<std::vector<Term>>();
    const auto density = require_field(j, "density", source).get<std::string>();
    if (density == "chebyshev") {
      model.density = NodeDensity::ChebyshevProduct;
    } else if (density == "uniform") {
      model.density = NodeDensity::Uniform;
    } else {
      throw DataError(source + ": unknown density '" + density + "'");
    }
    model.theta = require_field(j, "theta", source).get<double>();
    auto bandlimits =
        require_field(j, "bandlimits", source).get<std::vector<int>>();
    if (cardinality(term_set, bandlimits) > kMaxCoefficients) {
      throw ResourceError(source + ": model exceeds the coefficient load cap");
    }
    model.index_set =
        build_grouped_index_set(std::move(term_set), std::move(bandlimits));

    const auto& coeffs = require_field(j, "coefficients", source);
    if (!coeffs.is_array()) {
      throw DataError(source + ": 'coefficients' must be an array");
    }
    model.coefficients.reserve(coeffs.size());
    for (const auto& c : coeffs) {
      model.coefficients.push_back(
          parse_hex_double(c.get<std::string>(), source));
    }

    if (auto it = j.find("fit"); it != j.end()) {
      model.iterations = require_field(*it, "iterations", source).get<int>();
      model.converged = require_field(*it, "converged", source).get<bool>();
      model.residual_norm = parse_hex_double(
          require_field(*it, "residual_norm", source).get<std::string>(),
          source);
    }
    if (auto it = j.find("note"); it != j.end()) {
      model.note = it->get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  validate_model(model);
  return model;
}

ApproximationModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_model(in, path);
}

std::vector<double> evaluate_model(const ApproximationModel& model,
                                   const std::vector<double>& points,
                                   std::size_t n_points, int threads) {
  validate_model(model);
  const int d = model.index_set.term_set.d;
  if (points.size() != n_points * static_cast<std::size_t>(d)) {
    throw DataError("point buffer does not match n_points x dimension");
  }
  NodeSet nodes;
  nodes.d = d;
  nodes.density = model.density;
  nodes.coords = points;
  if (model.density == NodeDensity::Uniform) {
    for (double& c : nodes.coords) c *= 1.0 - model.theta;
    nodes.theta = model.theta;
  }
  validate_node_set(nodes);

  PlanOptions opts;
  opts.threads = threads;
  GroupedTransformPlan plan(nodes, model.index_set, opts);
  std::vector<double> values(n_points, 0.0);
  plan.apply(model.coefficients.data(), values.data());
  return values;
}

}  // namespace anovacheb
