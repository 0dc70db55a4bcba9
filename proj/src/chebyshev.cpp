#include "anovacheb/chebyshev.hpp"

#include <cmath>
#include <string>

#include "anovacheb/errors.hpp"

namespace anovacheb {

double chebyshev_basis(const std::vector<int>& k, const double* x) {
  double v = 1.0;
  for (std::size_t s = 0; s < k.size(); ++s) {
    if (k[s] == 0) continue;
    v *= 1.4142135623730950488 * std::cos(k[s] * std::acos(x[s]));
  }
  return v;
}

double chebyshev_density(const double* x, int d) {
  double v = 1.0;
  for (int s = 0; s < d; ++s) {
    const double t = 1.0 - x[s] * x[s];
    if (t <= 0.0)
      throw NumericError(
          "chebyshev density: singular at |x| = 1 in dimension " +
          std::to_string(s + 1));
    v /= 3.1415926535897932384626433832795 * std::sqrt(t);
  }
  return v;
}

std::vector<double> chebyshev_density(const NodeSet& nodes) {
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    w[j] = chebyshev_density(nodes.node(j), nodes.d);
  return w;
}

}  // namespace anovacheb
