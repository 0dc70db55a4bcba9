#include "anovacheb/sensitivity.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>

#include "anovacheb/errors.hpp"
#include "anovacheb/summation.hpp"

namespace anovacheb {

namespace {

double block_sum_squares(const double* coeffs, std::size_t begin,
                         std::size_t end) {
  std::vector<double> squares;
  squares.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) squares.push_back(coeffs[i] * coeffs[i]);
  return pairwise_sum(squares.data(), squares.size());
}

}  // namespace

double variance_from_coefficients(const GroupedIndexSet& set,
                                  const double* coeffs) {
  double total = 0.0;
  for (std::size_t t = 1; t < set.term_set.terms.size(); ++t) {
    total += block_sum_squares(coeffs, set.offsets[t], set.offsets[t + 1]);
  }
  return total;
}

double term_variance(const GroupedIndexSet& set, const double* coeffs,
                     const Term& u) {
  if (u.empty()) throw DataError("term variance is undefined for the empty term");
  const std::size_t t = set.term_set.find(u);
  if (t == set.term_set.size()) throw DataError("term not present in the index set");
  return block_sum_squares(coeffs, set.offsets[t], set.offsets[t + 1]);
}

SensitivityReport global_sensitivity_indices(const GroupedIndexSet& set,
                                             const double* coeffs) {
  SensitivityReport report;
  report.term_set = set.term_set;
  const std::size_t n_terms = set.term_set.terms.size();
  report.term_variance.assign(n_terms, 0.0);
  report.gsi.assign(n_terms, 0.0);

  double total = 0.0;
  for (std::size_t t = 1; t < n_terms; ++t) {
    const double v = block_sum_squares(coeffs, set.offsets[t], set.offsets[t + 1]);
    report.term_variance[t] = v;
    total += v;
  }
  report.total_variance = total;
  if (!(total > 0.0)) {
    throw NumericError(
        "total variance is zero: the fitted expansion is constant, "
        "sensitivity indices are undefined");
  }
  for (std::size_t t = 1; t < n_terms; ++t) {
    report.gsi[t] = report.term_variance[t] / total;
  }
  return report;
}

DetectionResult detect_active_set(const SensitivityReport& report,
                                  const std::vector<double>& eps,
                                  bool enforce_closure) {
  const auto& terms = report.term_set.terms;
  if (terms.empty() || !terms[0].empty()) {
    throw DataError("sensitivity report lacks the empty term");
  }
  int max_order = 0;
  for (const Term& u : terms) max_order = std::max<int>(max_order, int(u.size()));
  if (int(eps.size()) < max_order) {
    throw DataError("need a detection threshold for every order up to " +
                    std::to_string(max_order));
  }
  for (double e : eps) {
    if (!(e >= 0.0)) throw DataError("detection thresholds must be nonnegative");
  }

  std::set<Term> kept;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    if (report.gsi[t] > eps[terms[t].size() - 1]) kept.insert(terms[t]);
  }

  std::set<Term> added;
  if (enforce_closure) {
    // Insert every missing proper subset.  Iterating largest-first is not
    // needed: subsets of subsets are generated directly via the bit mask.
    for (const Term& u : kept) {
      const std::size_t q = u.size();
      for (std::size_t mask = 1; mask + 1 < (std::size_t(1) << q); ++mask) {
        Term sub;
        for (std::size_t b = 0; b < q; ++b) {
          if (mask & (std::size_t(1) << b)) sub.push_back(u[b]);
        }
        if (!kept.count(sub)) added.insert(sub);
      }
    }
  }

  DetectionResult result;
  result.active.d = report.term_set.d;
  result.active.terms.push_back(Term{});
  result.closure_added.push_back(0);
  std::vector<Term> merged(kept.begin(), kept.end());
  merged.insert(merged.end(), added.begin(), added.end());
  std::sort(merged.begin(), merged.end(), term_less);
  for (const Term& u : merged) {
    result.active.terms.push_back(u);
    result.closure_added.push_back(added.count(u) ? 1 : 0);
  }
  validate_term_set(result.active);
  return result;
}

int superposition_dimension(const SensitivityReport& report,
                            double delta_share) {
  if (!(delta_share >= 0.0 && delta_share <= 1.0)) {
    throw DataError("variance share must lie in [0, 1]");
  }
  if (!(report.total_variance > 0.0)) {
    throw NumericError("superposition dimension needs positive variance");
  }
  const auto& terms = report.term_set.terms;
  int max_order = 0;
  for (const Term& u : terms) max_order = std::max<int>(max_order, int(u.size()));
  // Terms are ordered by |u|, so accumulating in term order gives exact
  // prefix sums of the total.
  double cumulative = 0.0;
  int order = 0;
  for (std::size_t t = 1; t <= terms.size(); ++t) {
    if (t == terms.size() || int(terms[t].size()) > order) {
      if (cumulative >= delta_share * report.total_variance) return std::max(order, 1);
      if (t == terms.size()) break;
      order = int(terms[t].size());
    }
    cumulative += report.term_variance[t];
  }
  return max_order;
}

std::vector<double> project_coefficients(const GroupedIndexSet& set,
                                         const double* coeffs, const Term& u) {
  const std::size_t t = set.term_set.find(u);
  if (t == set.term_set.size()) throw DataError("term not present in the index set");
  return std::vector<double>(coeffs + set.offsets[t], coeffs + set.offsets[t + 1]);
}

}  // namespace anovacheb
