#include "anovacheb/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "anovacheb/errors.hpp"
#include "anovacheb/summation.hpp"

namespace anovacheb {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

double gauss_chebyshev(const std::function<double(double)>& f, int n) {
  if (n < 1) throw DataError("gauss-chebyshev: need n >= 1");
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    const double theta = (2.0 * i + 1.0) * kPi / (2.0 * n);
    vals[i] = f(std::cos(theta));
  }
  return pairwise_sum(vals.data(), vals.size()) / n;
}

double gauss_chebyshev_piecewise(const std::function<double(double)>& f,
                                 const std::vector<double>& breaks,
                                 int panels_per_piece) {
  if (panels_per_piece < 1)
    throw DataError("gauss-chebyshev: need at least one panel per piece");
  std::vector<double> cuts{0.0, kPi};
  for (double b : breaks)
    if (b > -1.0 && b < 1.0) cuts.push_back(std::acos(b));
  std::sort(cuts.begin(), cuts.end());
  auto g = [&](double theta) { return f(std::cos(theta)); };
  std::vector<double> parts;
  parts.reserve((cuts.size() - 1) * static_cast<std::size_t>(panels_per_piece));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = (cuts[i + 1] - cuts[i]) / panels_per_piece;
    for (int p = 0; p < panels_per_piece; ++p) {
      const double lo = cuts[i] + p * width;
      parts.push_back(boost::math::quadrature::gauss<double, 64>::integrate(
          g, lo, lo + width));
    }
  }
  return pairwise_sum(parts.data(), parts.size()) / kPi;
}

}  // namespace anovacheb
