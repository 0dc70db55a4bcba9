#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace anovacheb {

/// A coupling term: the set of interacting coordinate indices, 1-based,
/// strictly increasing.  The empty term stands for the constant part.
using Term = std::vector<int>;

/// Ordered collection of coupling terms over dimensions {1..d}.  The empty
/// term is always present and always first; the rest are kept in canonical
/// order (shorter terms first, lexicographic within one order).
struct AnovaTermSet {
  int d = 0;
  std::vector<Term> terms;

  std::size_t size() const { return terms.size(); }

  /// Position of `u`, or size() when absent.
  std::size_t find(const Term& u) const;

  bool contains(const Term& u) const { return find(u) < terms.size(); }

  /// Largest term order present.
  int max_order() const;
};

/// Validates d >= 1, membership of the empty term at the front, strictly
/// increasing in-range entries, no duplicates, canonical order.  Throws
/// DataError on violation.
void validate_term_set(const AnovaTermSet& set);

/// Canonical comparison: by term order first, then lexicographically.
bool term_less(const Term& a, const Term& b);

/// All terms of order <= ds over {1..d}, canonically ordered, empty term
/// included.  ds = 0 yields just the empty term.
AnovaTermSet build_superposition_term_set(int d, int ds);

/// Same but drawing entries from the given variables only (1-based,
/// strictly increasing, within {1..d}); d stays the ambient dimension.
/// Used after variable screening.
AnovaTermSet build_superposition_term_set(int d, int ds,
                                          const std::vector<int>& variables);

/// Term set from an explicit list of non-empty terms (any order, the empty
/// term may be present or not); result is canonically sorted with the empty
/// term prepended.  Duplicates are an error.
AnovaTermSet make_term_set(int d, std::vector<Term> nonempty_terms);

/// True when every subset of every member is also a member.
bool is_downward_closed(const AnovaTermSet& set);

}  // namespace anovacheb
