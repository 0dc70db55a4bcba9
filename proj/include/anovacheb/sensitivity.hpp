#pragma once

#include <vector>

#include "anovacheb/index_set.hpp"
#include "anovacheb/term_set.hpp"

namespace anovacheb {

/// Variance decomposition of a fitted expansion.  Entries are aligned with
/// term_set.terms; the empty term carries no variance and its slots are 0.
struct SensitivityReport {
  AnovaTermSet term_set;
  double total_variance = 0.0;
  std::vector<double> term_variance;
  std::vector<double> gsi;
  /// Filled after detection; empty until then.
  AnovaTermSet detected_active;
  std::vector<char> closure_added;  // aligned with detected_active.terms
};

/// Total variance: sum of squared coefficients over every nonzero
/// frequency.  Accumulated block-by-block in term order (pairwise within a
/// block), which makes it exactly the sum of the term variances.
double variance_from_coefficients(const GroupedIndexSet& set,
                                  const double* coeffs);

/// Variance carried by one non-empty term: the sum of squares of its
/// coefficient block.
double term_variance(const GroupedIndexSet& set, const double* coeffs,
                     const Term& u);

/// Ratios term variance / total variance for every non-empty term.
/// Throws NumericError when the total variance vanishes (degenerate
/// constant data).
SensitivityReport global_sensitivity_indices(const GroupedIndexSet& set,
                                             const double* coeffs);

struct DetectionResult {
  AnovaTermSet active;
  std::vector<char> closure_added;  // aligned with active.terms
};

/// Keeps every non-empty term whose index exceeds the threshold for its
/// order (eps[|u|-1]); the empty term is always kept.  With
/// enforce_closure (the default) missing subsets of kept terms are added
/// and flagged, so the result is always downward closed.
DetectionResult detect_active_set(const SensitivityReport& report,
                                  const std::vector<double>& eps,
                                  bool enforce_closure = true);

/// Smallest order s such that terms of order <= s carry at least
/// delta_share of the total variance.  delta_share in [0,1]; the cumulative
/// sums use the same accumulation order as the total, so delta_share = 1
/// is reached exactly at the maximum present order.
int superposition_dimension(const SensitivityReport& report,
                            double delta_share);

/// The coefficient block of one term, i.e. the coefficients of the ANOVA
/// term f_u of the expansion (the grouped layout already separates them).
std::vector<double> project_coefficients(const GroupedIndexSet& set,
                                         const double* coeffs, const Term& u);

}  // namespace anovacheb
