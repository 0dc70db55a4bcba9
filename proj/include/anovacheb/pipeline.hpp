#pragma once

#include <string>
#include <vector>

#include "anovacheb/model.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/sensitivity.hpp"
#include "anovacheb/solver.hpp"

namespace anovacheb {

struct FitOptions {
  LsqrConfig lsqr;
  PlanOptions plan;
  /// Rescaling padding applied when the data carries uniform nodes.
  double theta = kDefaultTheta;
};

struct FitReport {
  ApproximationModel model;
  bool underdetermined = false;
  /// Advisory only: index sets larger than M/log(2M) leave the regime
  /// where the least-squares matrix is expected to be well conditioned.
  bool size_advisory = false;
  double size_ratio = 0.0;  // |I| * log(2M) / M
};

/// First stage: fit every coupling term of order <= ds, bandlimits given
/// per order.  Dispatches on the dataset's node density (uniform data is
/// rescaled and row-weighted internally; the model records theta).
FitReport fit_initial(const Dataset& data, int ds,
                      const std::vector<int>& bandlimit_per_order,
                      const FitOptions& opts = {});

/// Fit over an explicit term set.
FitReport fit_term_set(const Dataset& data, const AnovaTermSet& terms,
                       const std::vector<int>& bandlimit_per_order,
                       const FitOptions& opts = {},
                       const std::string& note = "initial fit");

/// Second stage: fit again on a detected active set, usually with larger
/// bandlimits than the detection fit.  max_prior_order > 0 declares the
/// detection stage's order bound and rejects active terms beyond it; the
/// model note records both stages.
FitReport refit(const Dataset& data, const AnovaTermSet& active,
                const std::vector<int>& bandlimit_per_order,
                const FitOptions& opts = {}, int max_prior_order = 0);

/// Variance decomposition of a fitted model.
SensitivityReport analyze_model(const ApproximationModel& model);

}  // namespace anovacheb
