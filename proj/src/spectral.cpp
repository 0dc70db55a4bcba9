#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "anovacheb/chebyshev.hpp"
#include "anovacheb/errors.hpp"
#include "anovacheb/solver.hpp"

namespace anovacheb {

SpectralDiagnostic spectral_diagnostic(const NodeSet& nodes,
                                       const GroupedIndexSet& set,
                                       double delta, double theta,
                                       std::size_t max_columns) {
  validate_node_set(nodes);
  if (nodes.d != set.term_set.d)
    throw DataError("spectral diagnostic: dimension mismatch");
  if (!(delta > 0.0) || delta >= 1.0)
    throw DataError("spectral diagnostic: delta must lie in (0,1)");
  const std::size_t M = nodes.size();
  const std::size_t cols = set.size();
  if (cols > max_columns || cols == 0)
    throw ResourceError(
        "spectral diagnostic: index set too large for the dense check");
  if (M * cols > 200000000ULL)
    throw ResourceError("spectral diagnostic: matrix too large");

  const bool uniform = nodes.density == NodeDensity::Uniform;
  NodeSet work = nodes;
  if (uniform && work.theta == 0.0) work = scale_nodes(work, theta);
  const double th = uniform ? work.theta : 0.0;

  std::vector<double> w;
  if (uniform) {
    w = sqrt_density_weights(work);
    // The expected Gram identity assumes the uniform sampling volume is
    // absorbed into the weights; without the (2-2theta)^(d/2) factor the
    // singular values would sit near 2^(-d/2) instead of 1.
    const double vol = std::pow(2.0 * (1.0 - th), work.d);
    const double vs = std::sqrt(vol);
    for (double& x : w) x *= vs;
  }

  const auto indices = enumerate_indices(set);
  Eigen::MatrixXd B(M, cols);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));
  for (std::size_t j = 0; j < M; ++j) {
    const double row_scale = (uniform ? w[j] : 1.0) * inv_sqrt_m;
    const double* x = work.node(j);
    for (std::size_t i = 0; i < cols; ++i)
      B(j, i) = row_scale * chebyshev_basis(indices[i], x);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  const auto& sv = svd.singularValues();

  SpectralDiagnostic diag;
  diag.rows = M;
  diag.columns = cols;
  diag.max_singular = sv(0);
  diag.min_singular = sv(sv.size() - 1);

  if (uniform) {
    const int d = work.d;
    const int ds = set.term_set.max_order();
    const double kappa =
        std::pow(2.0 * th - th * th, 0.5 * d) /
        (std::pow(2.0, ds) * 48.0 * (std::sqrt(2.0) - std::log(delta)));
    const double logm = std::log(2.0 * static_cast<double>(M));
    const double gamma = std::pow(4.0, ds) * kappa *
                         std::pow(std::acos(1.0 - th) / 3.14159265358979323846,
                                  d) *
                         static_cast<double>(M) / logm;
    diag.kappa = kappa;
    diag.gamma = gamma;
    diag.stability_bound = kappa * static_cast<double>(M) / logm;
    diag.stability_condition =
        static_cast<double>(cols) <= diag.stability_bound;
    diag.band_low = std::sqrt(std::max(0.0, 0.5 - gamma));
    diag.band_high = std::sqrt(1.5 + gamma);
  } else {
    diag.band_low = std::sqrt(0.5);
    diag.band_high = std::sqrt(1.5);
  }
  diag.inside_band =
      diag.min_singular >= diag.band_low && diag.max_singular <= diag.band_high;
  return diag;
}

}  // namespace anovacheb
