#pragma once

#include <vector>

#include "anovacheb/index_set.hpp"
#include "anovacheb/lsqr.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/transform.hpp"

namespace anovacheb {

/// Default interior padding for the uniform-node rescaling.
inline constexpr double kDefaultTheta = 1e-4;

/// Returns a copy with every coordinate multiplied by (1-theta) and the
/// set's theta field stamped.  Rejects nodes already scaled.
NodeSet scale_nodes(const NodeSet& nodes, double theta = kDefaultTheta);

/// Row weights sqrt(chebyshev density) used by the uniform-node path.
std::vector<double> sqrt_density_weights(const NodeSet& nodes);

struct SolveResult {
  std::vector<double> coefficients;  // canonical grouped layout
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;
  double normal_residual_norm = 0.0;
  bool underdetermined = false;
};

/// Least-squares fit on Chebyshev-density nodes: min ||y - F h||_2 with F
/// applied through a grouped transform plan.
SolveResult solve_chebyshev_nodes(const Dataset& data,
                                  const GroupedIndexSet& set,
                                  const LsqrConfig& cfg = {},
                                  const PlanOptions& plan = {});

/// Uniform-node fit: nodes are scaled by (1-theta), rows are weighted by
/// sqrt of the Chebyshev density at the scaled nodes, and the weighted
/// system min ||W y - W F h||_2 is solved.  The returned coefficients
/// expand in the basis over the scaled coordinates; evaluation must apply
/// the same scaling (the pipeline's model records theta for this).
SolveResult solve_uniform_nodes(const Dataset& data,
                                const GroupedIndexSet& set,
                                double theta = kDefaultTheta,
                                const LsqrConfig& cfg = {},
                                const PlanOptions& plan = {});

struct SpectralDiagnostic {
  std::size_t rows = 0;
  std::size_t columns = 0;
  double min_singular = 0.0;  // of the normalized (weighted) matrix / sqrt(M)
  double max_singular = 0.0;
  double band_low = 0.0;
  double band_high = 0.0;
  bool inside_band = false;
  // Uniform case only: inflation gamma and the stability constant kappa
  // with the index-count bound kappa * M / log(2M) it implies.
  double gamma = 0.0;
  double kappa = 0.0;
  double stability_bound = 0.0;
  bool stability_condition = false;
};

/// Dense singular-value check of the normalized basis matrix against the
/// concentration band.  Chebyshev nodes: F/sqrt(M) against
/// [sqrt(1/2), sqrt(3/2)].  Uniform nodes: rows are weighted, scaled by
/// the sampling volume so the expected Gram is the identity, and the band
/// is widened by gamma computed from kappa(delta, theta).  Guarded by a
/// size cap (columns <= 2000) since the matrix is materialized.
SpectralDiagnostic spectral_diagnostic(const NodeSet& nodes,
                                       const GroupedIndexSet& set,
                                       double delta = 0.5,
                                       double theta = kDefaultTheta,
                                       std::size_t max_columns = 2000);

}  // namespace anovacheb
