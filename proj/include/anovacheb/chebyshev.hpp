#pragma once

#include <cstddef>
#include <vector>

#include "anovacheb/node_set.hpp"

namespace anovacheb {

/// Orthonormal tensor Chebyshev polynomial: product over the support of k
/// of cos(k_s arccos x_s), scaled by sqrt(2) per active dimension.  The
/// family is orthonormal under the product Chebyshev density.
double chebyshev_basis(const std::vector<int>& k, const double* x);

/// Product Chebyshev density 1 / (pi sqrt(1-x_s^2)) over all d dimensions.
/// Throws NumericError when any |x_s| = 1 (the density is singular there).
double chebyshev_density(const double* x, int d);

/// Density evaluated on every node of a set.
std::vector<double> chebyshev_density(const NodeSet& nodes);

}  // namespace anovacheb
