#include "anovacheb/pipeline.hpp"

#include <cmath>
#include <string>

#include "anovacheb/errors.hpp"

namespace anovacheb {

FitReport fit_term_set(const Dataset& data, const AnovaTermSet& terms,
                       const std::vector<int>& bandlimit_per_order,
                       const FitOptions& opts, const std::string& note) {
  validate_dataset(data);
  if (data.nodes.d != terms.d) {
    throw DataError("term set dimension does not match the data");
  }
  GroupedIndexSet set =
      build_grouped_index_set_by_order(terms, bandlimit_per_order);

  SolveResult solve;
  FitReport report;
  if (data.nodes.density == NodeDensity::ChebyshevProduct) {
    solve = solve_chebyshev_nodes(data, set, opts.lsqr, opts.plan);
    report.model.theta = 0.0;
  } else {
    solve = solve_uniform_nodes(data, set, opts.theta, opts.lsqr, opts.plan);
    report.model.theta = opts.theta;
  }

  report.model.index_set = std::move(set);
  report.model.density = data.nodes.density;
  report.model.coefficients = std::move(solve.coefficients);
  report.model.iterations = solve.iterations;
  report.model.converged = solve.converged;
  report.model.residual_norm = solve.residual_norm;
  report.model.note = note;
  report.underdetermined = solve.underdetermined;

  const double m = static_cast<double>(data.size());
  report.size_ratio =
      static_cast<double>(report.model.index_set.size()) * std::log(2.0 * m) / m;
  report.size_advisory = report.size_ratio > 1.0;
  return report;
}

FitReport fit_initial(const Dataset& data, int ds,
                      const std::vector<int>& bandlimit_per_order,
                      const FitOptions& opts) {
  if (ds < 1) throw DataError("superposition threshold must be >= 1");
  return fit_term_set(data, build_superposition_term_set(data.nodes.d, ds),
                      bandlimit_per_order, opts, "initial fit");
}

FitReport refit(const Dataset& data, const AnovaTermSet& active,
                const std::vector<int>& bandlimit_per_order,
                const FitOptions& opts, int max_prior_order) {
  validate_term_set(active);
  if (max_prior_order > 0 && active.max_order() > max_prior_order) {
    throw DataError(
        "active set contains terms beyond the detection stage's order bound");
  }
  std::string note = "refit";
  if (max_prior_order > 0) {
    note += " (detection stage order " + std::to_string(max_prior_order) + ")";
  }
  return fit_term_set(data, active, bandlimit_per_order, opts, note);
}

SensitivityReport analyze_model(const ApproximationModel& model) {
  validate_model(model);
  return global_sensitivity_indices(model.index_set,
                                    model.coefficients.data());
}

}  // namespace anovacheb
