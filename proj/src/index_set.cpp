#include "anovacheb/index_set.hpp"

#include <limits>
#include <string>

#include "anovacheb/errors.hpp"

namespace anovacheb {

namespace {

void check_bandlimits(const AnovaTermSet& terms,
                      const std::vector<int>& bandlimits) {
  if (bandlimits.size() != terms.size())
    throw DataError("grouped index set: one bandlimit per term required");
  for (std::size_t t = 1; t < terms.size(); ++t)
    if (bandlimits[t] < 2)
      throw DataError(
          "grouped index set: bandlimits must be >= 2 (term would be empty)");
}

std::uint64_t pow_checked(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      throw ResourceError("grouped index set: cardinality overflows");
    r *= base;
  }
  return r;
}

}  // namespace

std::uint64_t cardinality(const AnovaTermSet& terms,
                          const std::vector<int>& bandlimits) {
  validate_term_set(terms);
  check_bandlimits(terms, bandlimits);
  std::uint64_t total = 1;  // zero frequency
  for (std::size_t t = 1; t < terms.size(); ++t) {
    std::uint64_t block = pow_checked(
        static_cast<std::uint64_t>(bandlimits[t] - 1), terms.terms[t].size());
    if (total > std::numeric_limits<std::uint64_t>::max() - block)
      throw ResourceError("grouped index set: cardinality overflows");
    total += block;
  }
  return total;
}

GroupedIndexSet build_grouped_index_set(AnovaTermSet terms,
                                        std::vector<int> bandlimits) {
  validate_term_set(terms);
  if (!bandlimits.empty()) bandlimits[0] = 1;
  check_bandlimits(terms, bandlimits);
  GroupedIndexSet set;
  set.offsets.resize(terms.size() + 1);
  set.offsets[0] = 0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    std::uint64_t block =
        t == 0 ? 1
               : pow_checked(static_cast<std::uint64_t>(bandlimits[t] - 1),
                             terms.terms[t].size());
    set.offsets[t + 1] = set.offsets[t] + static_cast<std::size_t>(block);
  }
  set.term_set = std::move(terms);
  set.bandlimits = std::move(bandlimits);
  return set;
}

GroupedIndexSet build_grouped_index_set_by_order(
    AnovaTermSet terms, const std::vector<int>& per_order) {
  validate_term_set(terms);
  std::vector<int> bandlimits(terms.size(), 1);
  for (std::size_t t = 1; t < terms.size(); ++t) {
    std::size_t order = terms.terms[t].size();
    if (order > per_order.size())
      throw DataError("grouped index set: no bandlimit given for order " +
                      std::to_string(order));
    bandlimits[t] = per_order[order - 1];
  }
  return build_grouped_index_set(std::move(terms), std::move(bandlimits));
}

std::vector<std::vector<int>> enumerate_indices(const GroupedIndexSet& set) {
  const int d = set.term_set.d;
  std::vector<std::vector<int>> out;
  out.reserve(set.size());
  out.emplace_back(d, 0);
  for (std::size_t t = 1; t < set.term_set.size(); ++t) {
    const Term& u = set.term_set.terms[t];
    const int n = set.bandlimits[t] - 1;  // degrees run 1..n per dimension
    std::vector<int> k(u.size(), 1);
    for (std::size_t c = 0; c < set.block_size(t); ++c) {
      std::vector<int> full(d, 0);
      for (std::size_t i = 0; i < u.size(); ++i) full[u[i] - 1] = k[i];
      out.push_back(std::move(full));
      // Odometer step, last listed dimension fastest.
      for (int i = static_cast<int>(u.size()) - 1; i >= 0; --i) {
        if (k[i] < n) {
          ++k[i];
          break;
        }
        k[i] = 1;
      }
    }
  }
  return out;
}

}  // namespace anovacheb
