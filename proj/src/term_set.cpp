#include "anovacheb/term_set.hpp"

#include <algorithm>
#include <string>

#include "anovacheb/errors.hpp"

namespace anovacheb {

namespace {

std::string term_to_string(const Term& u) {
  std::string s = "{";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(u[i]);
  }
  return s + "}";
}

}  // namespace

bool term_less(const Term& a, const Term& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t AnovaTermSet::find(const Term& u) const {
  // Terms are few (hundreds at most); linear scan keeps the structure plain.
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i] == u) return i;
  return terms.size();
}

int AnovaTermSet::max_order() const {
  std::size_t m = 0;
  for (const Term& u : terms) m = std::max(m, u.size());
  return static_cast<int>(m);
}

void validate_term_set(const AnovaTermSet& set) {
  if (set.d < 1) throw DataError("term set: dimension must be >= 1");
  if (set.terms.empty() || !set.terms.front().empty())
    throw DataError("term set: the empty term must be present and first");
  for (const Term& u : set.terms) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] < 1 || u[i] > set.d)
        throw DataError("term set: entry out of range in term " +
                        term_to_string(u));
      if (i > 0 && u[i] <= u[i - 1])
        throw DataError("term set: entries must be strictly increasing in " +
                        term_to_string(u));
    }
  }
  for (std::size_t i = 1; i < set.terms.size(); ++i) {
    if (!term_less(set.terms[i - 1], set.terms[i])) {
      if (set.terms[i - 1] == set.terms[i])
        throw DataError("term set: duplicate term " +
                        term_to_string(set.terms[i]));
      throw DataError("term set: terms not in canonical order near " +
                      term_to_string(set.terms[i]));
    }
  }
}

AnovaTermSet build_superposition_term_set(int d, int ds) {
  std::vector<int> all(static_cast<std::size_t>(std::max(d, 0)));
  for (int i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  return build_superposition_term_set(d, ds, all);
}

AnovaTermSet build_superposition_term_set(int d, int ds,
                                          const std::vector<int>& variables) {
  if (d < 1) throw DataError("superposition term set: d must be >= 1");
  if (ds < 0 || ds > d)
    throw DataError("superposition term set: need 0 <= ds <= d");
  const int v = static_cast<int>(variables.size());
  for (int i = 0; i < v; ++i) {
    if (variables[i] < 1 || variables[i] > d)
      throw DataError("superposition term set: variable label out of range");
    if (i > 0 && variables[i] <= variables[i - 1])
      throw DataError(
          "superposition term set: variables must be strictly increasing");
  }
  AnovaTermSet set;
  set.d = d;
  set.terms.push_back({});
  // Combination odometer over positions into `variables`; sorted labels
  // make position-lexicographic also label-lexicographic, one order at a
  // time, which is the canonical order.
  std::vector<int> pos;
  for (int order = 1; order <= std::min(ds, v); ++order) {
    pos.assign(order, 0);
    for (int i = 0; i < order; ++i) pos[i] = i;
    while (true) {
      Term u(order);
      for (int i = 0; i < order; ++i) u[i] = variables[pos[i]];
      set.terms.push_back(std::move(u));
      int p = order - 1;
      while (p >= 0 && pos[p] == v - (order - p)) --p;
      if (p < 0) break;
      ++pos[p];
      for (int i = p + 1; i < order; ++i) pos[i] = pos[i - 1] + 1;
    }
  }
  return set;
}

AnovaTermSet make_term_set(int d, std::vector<Term> nonempty_terms) {
  AnovaTermSet set;
  set.d = d;
  set.terms.push_back({});
  for (Term& u : nonempty_terms) {
    if (u.empty()) continue;
    set.terms.push_back(std::move(u));
  }
  std::sort(set.terms.begin() + 1, set.terms.end(), term_less);
  validate_term_set(set);
  return set;
}

bool is_downward_closed(const AnovaTermSet& set) {
  for (const Term& u : set.terms) {
    if (u.size() < 2) continue;  // singletons only need the empty term
    // Check the |u| facets (u minus one element); closure of those implies
    // closure of all deeper subsets by induction over the set.
    for (std::size_t drop = 0; drop < u.size(); ++drop) {
      Term v;
      v.reserve(u.size() - 1);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (i != drop) v.push_back(u[i]);
      if (!set.contains(v)) return false;
    }
  }
  return true;
}

}  // namespace anovacheb
