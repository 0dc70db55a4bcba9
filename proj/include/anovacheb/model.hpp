#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "anovacheb/index_set.hpp"
#include "anovacheb/node_set.hpp"

namespace anovacheb {

/// A fitted expansion: the grouped index set, its coefficients and the
/// node model the fit assumed.  For uniform fits the coefficients expand
/// over coordinates scaled by (1-theta); evaluation applies the same
/// scaling, so callers always pass raw points.
struct ApproximationModel {
  GroupedIndexSet index_set;
  NodeDensity density = NodeDensity::ChebyshevProduct;
  double theta = 0.0;
  std::vector<double> coefficients;
  /// Informational fit record.
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;
  /// Free-form provenance note ("initial fit", "refit", ...).
  std::string note;
};

void validate_model(const ApproximationModel& model);

/// JSON serialisation, format version "1".  Coefficients are written as
/// hexadecimal float literals so save/load round-trips bit for bit.  Keys
/// are emitted in sorted order, so equal models produce identical bytes.
void save_model(std::ostream& out, const ApproximationModel& model);
void save_model_file(const std::string& path, const ApproximationModel& model);

/// Throws DataError on malformed input or an unsupported format version
/// and ResourceError when the coefficient count exceeds the load cap.
ApproximationModel load_model(std::istream& in,
                              const std::string& source = "<input>");
ApproximationModel load_model_file(const std::string& path);

/// Values of the model at raw points (row-major, n_points x d).  Uniform
/// models scale the points by (1-theta) first.
std::vector<double> evaluate_model(const ApproximationModel& model,
                                   const std::vector<double>& points,
                                   std::size_t n_points, int threads = 1);

}  // namespace anovacheb
