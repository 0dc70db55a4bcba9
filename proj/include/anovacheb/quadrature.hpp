#pragma once

#include <functional>
#include <vector>

namespace anovacheb {

/// Integral of f against the 1-D Chebyshev density, (1/pi) int_0^pi
/// f(cos t) dt, by the n-point Gauss-Chebyshev rule (midpoints in angle).
/// Exact for polynomials of degree < n; for merely piecewise-smooth f use
/// a large n or the piecewise rule below.
double gauss_chebyshev(const std::function<double(double)>& f, int n);

/// Same integral for piecewise-smooth f whose pieces are analytic between
/// the given break abscissas in [-1,1]: the angular interval is split at
/// arccos of each break and a fixed-order Gauss-Legendre rule is applied
/// per piece.  Machine precision for piecewise-polynomial integrands.
/// panels_per_piece subdivides each piece further; raise it roughly to the
/// frequency when the integrand carries an oscillatory factor like
/// cos(k arccos x), so every panel sees at most one period.
double gauss_chebyshev_piecewise(const std::function<double(double)>& f,
                                 const std::vector<double>& breaks,
                                 int panels_per_piece = 1);

}  // namespace anovacheb
