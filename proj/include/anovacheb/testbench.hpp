#pragma once

#include <cstdint>
#include <vector>

#include "anovacheb/model.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/pipeline.hpp"
#include "anovacheb/rng.hpp"
#include "anovacheb/term_set.hpp"

namespace anovacheb {

/// Nodes drawn i.i.d. from the Chebyshev product density, x = cos(pi u).
/// Coordinates are drawn node-major, dimension fastest, so a sampler's
/// output is fixed by the generator's seed alone.
NodeSet sample_chebyshev_nodes(int d, std::size_t count, SplitMix64& rng);

/// Nodes drawn i.i.d. uniformly from the open cube (-1,1)^d, same draw
/// order.  theta is left 0; fitting applies the rescaling.
NodeSet sample_uniform_nodes(int d, std::size_t count, SplitMix64& rng);

/// Adds independent N(0, std_dev^2) noise to each value in place.
void add_gaussian_noise(std::vector<double>& values, double std_dev,
                        SplitMix64& rng);

// ---------------------------------------------------------------------
// Product B-spline test function on [-1,1]^8:
//   f(x) = sum_{i=1..4} B2(x_i) B4(x_{i+4}),
// where B2/B4 restrict the centered cardinal B-splines of order 3/5 to a
// decreasing flank (arguments (x+3/2)/2 and (x+5/2)/2) and are normalized
// to unit weighted L2 norm.  Every coupling of f is either a singleton or
// one of the pairs {i, i+4}.

inline constexpr int kBsplineDimension = 8;

double bspline_b2(double x);
double bspline_b4(double x);
double bspline_test_function(const double* x);

/// The 13 terms actually present in the test function: the empty term,
/// all 8 singletons and the pairs {1,5}, {2,6}, {3,7}, {4,8}.
AnovaTermSet bspline_active_set();

/// Basis coefficients of the two univariate factors, computed by
/// piecewise Gauss quadrature with per-frequency panel refinement, plus
/// the squared weighted L2 norm of the 8-dimensional function.  Tables
/// run to degree kmax but are cut where the magnitude stays below 1e-14
/// (the order-5 factor decays like k^-5 and its table ends near degree
/// 500; the order-3 factor runs to any practical kmax).
struct BsplineReference {
  std::vector<double> b2;
  std::vector<double> b4;
  double norm_squared = 0.0;
};
BsplineReference bspline_reference(int kmax);

// ---------------------------------------------------------------------
// Error metrics.

/// Relative l2 error on the data, ||y - model(nodes)|| / ||y||.
double train_error_l2(const ApproximationModel& model, const Dataset& data,
                      int threads = 1);

/// Relative weighted-L2 distance between the B-spline test function and a
/// model fitted to it, evaluated through the coefficient identity
///   ||f - g||^2 = ||f||^2 + sum_{k in I} (|c_k - g_k|^2 - |c_k|^2)
/// with reference coefficients c_k assembled from the factor tables.
/// Models of dimension != 8 are rejected (no reference available).
double generalization_error_l2(const ApproximationModel& model,
                               const BsplineReference& ref);

/// Mean squared deviation, divisor = observation count.
double mean_squared_error(const std::vector<double>& predictions,
                          const std::vector<double>& observations);

/// Sample median (average of the middle pair for even counts).
double median(std::vector<double> values);
/// Linearly interpolated quantile of sorted data, p in [0,1].
double quantile(const std::vector<double>& sorted, double p);

// ---------------------------------------------------------------------
// Friedman regression benchmarks on [-1,1]^d, d = 10, 4, 4; inputs are
// mapped to the classic unit-cube domains internally.

int friedman_dimension(int which);
double friedman_noise_std(int which);  // 1, 125, 0.1
double friedman(int which, const double* x);

struct FriedmanOptions {
  int repetitions = 100;
  std::size_t train_size = 200;
  std::size_t test_size = 1000;
  std::uint64_t seed = 202209;
  /// Parallelism across repetitions; results are independent of it.
  int threads = 0;
};

struct FriedmanRepetition {
  std::uint64_t seed = 0;  // the repetition's own generator seed
  double mse = 0.0;
  double mse_zero_model = 0.0;  // against the constant-zero predictor
  double train_error = 0.0;
  AnovaTermSet detected;
};

struct FriedmanSummary {
  int which = 0;
  FriedmanOptions options;
  std::vector<FriedmanRepetition> repetitions;
  double median_mse = 0.0;
  double lower_quartile_mse = 0.0;
  double upper_quartile_mse = 0.0;
};

/// One full benchmark: per repetition r = 1..R, a generator seeded
/// seed + r draws train nodes, train noise, test nodes, test noise (in
/// that order); the staged recipe runs the active-set detection (the
/// outcome lands in `detected`), then the reported model is fit on the
/// benchmark's reference active set and its mse taken against the noisy
/// test values.  Repetitions run in parallel without affecting any
/// output bit.
///
/// All fits solve the plain (unweighted) least-squares system: the mse
/// is an unweighted average over uniform test nodes, so the unweighted
/// estimator is the one that minimizes the reported metric.
///
/// Recipes (detection stage / reference set):
///   1: screen singletons at bandlimits (4,2) keeping gsi > 0.02, fit
///      order-2 terms over the kept variables at (4,4), detect with
///      eps = 0.03; reference set {},{1}..{5},{1,2} at (4,4).
///   2: fit order-2 at (2,2), detect with eps = 0.03; reference set
///      {},{2},{3},{2,3} at (2,2).
///   3: fit order-2 at (8,2), detect with eps = 0.002; reference set
///      order-2 closure of {1,2,3} at (8,2).
FriedmanSummary run_friedman_experiment(int which,
                                        const FriedmanOptions& opts = {});

// ---------------------------------------------------------------------
// B-spline experiments.

struct BsplineDetectionOptions {
  int repetitions = 100;
  std::size_t node_count = 10000;
  NodeDensity density = NodeDensity::ChebyshevProduct;
  int n1 = 20;
  int n2 = 8;
  double eps = 0.005;
  std::uint64_t seed = 202209;
  int threads = 0;  // across repetitions
};

struct BsplineDetectionRepetition {
  std::uint64_t seed = 0;
  bool exact_recovery = false;  // detected set equals the true active set
  /// min gsi over true terms / max gsi over the rest (inf when the rest
  /// carry no variance at all).
  double separation = 0.0;
  double train_error = 0.0;
  double generalization_error = 0.0;
};

struct BsplineDetectionSummary {
  BsplineDetectionOptions options;
  std::vector<BsplineDetectionRepetition> repetitions;
  int exact_count = 0;
  double min_separation = 0.0;
};

/// Noiseless samples of the test function; detection fit over all order-2
/// terms at (n1, n2); threshold eps per order.
BsplineDetectionSummary run_bspline_detection(
    const BsplineDetectionOptions& opts = {});

struct BsplineFitRow {
  int n1 = 0;
  int n2 = 0;
  std::uint64_t index_count = 0;
  double train_error = 0.0;
  double generalization_error = 0.0;
};

/// Detection-stage fit and active-set refit on one sampled node set, for
/// the benchmark table and the refit-improves check.
struct BsplineFitPair {
  BsplineFitRow detection;  // all order-2 terms at (det_n1, det_n2)
  BsplineFitRow refit;      // true active set at (refit_n1, refit_n2)
};
BsplineFitPair run_bspline_fit_pair(std::uint64_t seed, std::size_t node_count,
                                    NodeDensity density, int det_n1, int det_n2,
                                    int refit_n1, int refit_n2,
                                    int threads = 1);

}  // namespace anovacheb
