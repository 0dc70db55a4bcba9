#pragma once

#include <cstdint>
#include <vector>

#include "anovacheb/term_set.hpp"

namespace anovacheb {

/// Frequency index set grouped by coupling term.  Term u contributes the
/// box {1..N_u-1}^|u| of per-dimension degrees (all entries >= 1 so that
/// the support is exactly u); the empty term contributes the single zero
/// frequency.  Blocks follow the term-set order; within a block the degree
/// tuples are lexicographic with the first listed dimension slowest.
struct GroupedIndexSet {
  AnovaTermSet term_set;
  /// Bandlimit per term, aligned with term_set.terms.  Entry 0 (the empty
  /// term) is fixed to 1; every other entry must be >= 2.
  std::vector<int> bandlimits;
  /// Prefix offsets into the flat coefficient layout; offsets[t] is the
  /// first flat position of term t and offsets.back() the total size.
  std::vector<std::size_t> offsets;

  std::size_t size() const { return offsets.back(); }
  std::size_t block_size(std::size_t t) const {
    return offsets[t + 1] - offsets[t];
  }
};

/// Builds the grouped set with one bandlimit per term (aligned with the
/// term-set order; the empty term's entry is ignored and normalised to 1).
GroupedIndexSet build_grouped_index_set(AnovaTermSet terms,
                                        std::vector<int> bandlimits);

/// Convenience: one bandlimit per term order.  per_order[k-1] applies to
/// all terms of order k; the list must cover the set's maximum order.
GroupedIndexSet build_grouped_index_set_by_order(
    AnovaTermSet terms, const std::vector<int>& per_order);

/// Number of frequencies, 1 + sum over non-empty terms of (N_u-1)^|u|,
/// without materialising anything.
std::uint64_t cardinality(const AnovaTermSet& terms,
                          const std::vector<int>& bandlimits);

/// Materialises the full d-dimensional multi-indices in canonical order.
/// Row j of the result is the j-th frequency as d nonnegative degrees.
std::vector<std::vector<int>> enumerate_indices(const GroupedIndexSet& set);

}  // namespace anovacheb
