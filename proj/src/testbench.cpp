#include "anovacheb/testbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anovacheb/errors.hpp"
#include "anovacheb/parallel.hpp"
#include "anovacheb/quadrature.hpp"
#include "anovacheb/summation.hpp"

namespace anovacheb {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// Centered cardinal B-spline of order n in truncated-power form,
// M_n(t) = (1/(n-1)!) sum_j (-1)^j C(n,j) (t + n/2 - j)_+^{n-1}.
double cardinal_bspline(int n, double t) {
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= n; ++j) {
    const double arg = t + 0.5 * n - j;
    if (arg > 0.0) {
      double p = 1.0;
      for (int e = 0; e < n - 1; ++e) p *= arg;
      sum += (j % 2 ? -binom : binom) * p;
    }
    binom = binom * (n - j) / (j + 1);
  }
  double factorial = 1.0;
  for (int e = 2; e < n; ++e) factorial *= e;
  return sum / factorial;
}

// Unnormalized factors: decreasing flanks of the order-3/order-5 splines.
// The inner affine maps put x in [0.25, 1.25] resp. [0.75, 1.75] of the
// spline argument, so each factor has exactly one knot inside (-1,1):
// x = -1/2 for the order-3 factor and x = 1/2 for the order-5 one.
double b2_raw(double x) { return cardinal_bspline(3, 0.5 * (x + 1.5)); }
double b4_raw(double x) { return cardinal_bspline(5, 0.5 * (x + 2.5)); }

struct FactorConstants {
  double c2 = 0.0;  // normalizers to unit weighted L2 norm
  double c4 = 0.0;
  double a = 0.0;  // degree-0 coefficients of the normalized factors
  double b = 0.0;
};

const FactorConstants& factor_constants() {
  static const FactorConstants fc = [] {
    FactorConstants r;
    const double i2 = gauss_chebyshev_piecewise(
        [](double x) {
          const double v = b2_raw(x);
          return v * v;
        },
        {-0.5});
    const double i4 = gauss_chebyshev_piecewise(
        [](double x) {
          const double v = b4_raw(x);
          return v * v;
        },
        {0.5});
    r.c2 = 1.0 / std::sqrt(i2);
    r.c4 = 1.0 / std::sqrt(i4);
    r.a = gauss_chebyshev_piecewise(
        [&](double x) { return r.c2 * b2_raw(x); }, {-0.5});
    r.b = gauss_chebyshev_piecewise(
        [&](double x) { return r.c4 * b4_raw(x); }, {0.5});
    return r;
  }();
  return fc;
}

// Degree-k coefficients of one normalized factor, stopping once the
// magnitudes stay below 1e-14.  Panels scale with k so every Gauss panel
// sees at most one oscillation period.
std::vector<double> factor_coefficients(bool order2, int kmax) {
  const FactorConstants& fc = factor_constants();
  const std::vector<double> breaks{order2 ? -0.5 : 0.5};
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(kmax) + 1);
  int below = 0;
  for (int k = 0; k <= kmax; ++k) {
    auto f = [&](double x) {
      const double basis =
          k == 0 ? 1.0 : kSqrt2 * std::cos(k * std::acos(x));
      const double v = order2 ? fc.c2 * b2_raw(x) : fc.c4 * b4_raw(x);
      return v * basis;
    };
    table.push_back(gauss_chebyshev_piecewise(f, breaks, std::max(1, k)));
    if (std::abs(table.back()) < 1e-14) {
      if (++below >= 8) break;
    } else {
      below = 0;
    }
  }
  while (!table.empty() && std::abs(table.back()) < 1e-14) table.pop_back();
  return table;
}

}  // namespace

NodeSet sample_chebyshev_nodes(int d, std::size_t count, SplitMix64& rng) {
  if (d < 1) throw DataError("sampler: dimension must be >= 1");
  NodeSet nodes;
  nodes.d = d;
  nodes.density = NodeDensity::ChebyshevProduct;
  nodes.coords.resize(count * static_cast<std::size_t>(d));
  for (double& c : nodes.coords) c = std::cos(kPi * rng.uniform_open());
  return nodes;
}

NodeSet sample_uniform_nodes(int d, std::size_t count, SplitMix64& rng) {
  if (d < 1) throw DataError("sampler: dimension must be >= 1");
  NodeSet nodes;
  nodes.d = d;
  nodes.density = NodeDensity::Uniform;
  nodes.coords.resize(count * static_cast<std::size_t>(d));
  for (double& c : nodes.coords) c = 2.0 * rng.uniform_open() - 1.0;
  return nodes;
}

void add_gaussian_noise(std::vector<double>& values, double std_dev,
                        SplitMix64& rng) {
  if (!(std_dev >= 0.0)) throw DataError("noise level must be nonnegative");
  for (double& v : values) v += std_dev * rng.gaussian();
}

double bspline_b2(double x) { return factor_constants().c2 * b2_raw(x); }
double bspline_b4(double x) { return factor_constants().c4 * b4_raw(x); }

double bspline_test_function(const double* x) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += bspline_b2(x[i]) * bspline_b4(x[i + 4]);
  return s;
}

AnovaTermSet bspline_active_set() {
  std::vector<Term> terms;
  for (int i = 1; i <= kBsplineDimension; ++i) terms.push_back({i});
  for (int i = 1; i <= 4; ++i) terms.push_back({i, i + 4});
  return make_term_set(kBsplineDimension, std::move(terms));
}

BsplineReference bspline_reference(int kmax) {
  if (kmax < 0) throw DataError("reference table degree must be >= 0");
  BsplineReference ref;
  ref.b2 = factor_coefficients(true, kmax);
  ref.b4 = factor_coefficients(false, kmax);
  // The four products have unit norm each; the 12 ordered cross pairs
  // reduce to the product of the degree-0 coefficients.
  const double ab = ref.b2[0] * ref.b4[0];
  ref.norm_squared = 4.0 + 12.0 * ab * ab;
  return ref;
}

double train_error_l2(const ApproximationModel& model, const Dataset& data,
                      int threads) {
  validate_dataset(data);
  if (data.nodes.theta != 0.0) {
    throw DataError("training error expects raw, unscaled data");
  }
  const std::vector<double> pred =
      evaluate_model(model, data.nodes.coords, data.size(), threads);
  std::vector<double> diff(data.size());
  for (std::size_t j = 0; j < data.size(); ++j)
    diff[j] = data.values[j] - pred[j];
  const double y2 = pairwise_dot(data.values.data(), data.values.data(),
                                 data.values.size());
  if (!(y2 > 0.0))
    throw NumericError("relative training error undefined for zero data");
  const double d2 = pairwise_dot(diff.data(), diff.data(), diff.size());
  return std::sqrt(d2 / y2);
}

double generalization_error_l2(const ApproximationModel& model,
                               const BsplineReference& ref) {
  validate_model(model);
  if (model.index_set.term_set.d != kBsplineDimension) {
    throw DataError(
        "reference coefficients cover the 8-dimensional product test "
        "function only");
  }
  if (ref.b2.empty() || ref.b4.empty() || !(ref.norm_squared > 0.0)) {
    throw DataError("reference tables are empty");
  }
  auto b2c = [&](int k) {
    return k < static_cast<int>(ref.b2.size()) ? ref.b2[k] : 0.0;
  };
  auto b4c = [&](int k) {
    return k < static_cast<int>(ref.b4.size()) ? ref.b4[k] : 0.0;
  };
  const double a = ref.b2[0];
  const double b = ref.b4[0];

  // ||f - g||^2 = ||f||^2 + sum_{k in I} ((c_k - g_k)^2 - c_k^2); the
  // reference coefficient c_k follows the product structure per support.
  const GroupedIndexSet& set = model.index_set;
  const double* h = model.coefficients.data();
  double delta = ref.norm_squared;
  for (std::size_t t = 0; t < set.term_set.size(); ++t) {
    const Term& u = set.term_set.terms[t];
    const std::size_t begin = set.offsets[t];
    const int n = set.bandlimits[t] - 1;
    if (u.empty()) {
      const double c = 4.0 * a * b;
      delta += (c - h[0]) * (c - h[0]) - c * c;
    } else if (u.size() == 1) {
      for (int k = 1; k <= n; ++k) {
        const double c = u[0] <= 4 ? b2c(k) * b : a * b4c(k);
        const double hv = h[begin + static_cast<std::size_t>(k - 1)];
        delta += (c - hv) * (c - hv) - c * c;
      }
    } else if (u.size() == 2 && u[1] - u[0] == 4) {
      for (int k1 = 1; k1 <= n; ++k1) {
        for (int k2 = 1; k2 <= n; ++k2) {
          const double c = b2c(k1) * b4c(k2);
          const std::size_t flat =
              begin + static_cast<std::size_t>(k1 - 1) *
                          static_cast<std::size_t>(n) +
              static_cast<std::size_t>(k2 - 1);
          delta += (c - h[flat]) * (c - h[flat]) - c * c;
        }
      }
    } else {
      // No coupling of the test function lives here; the fit's leakage
      // counts in full.
      for (std::size_t i = begin; i < set.offsets[t + 1]; ++i)
        delta += h[i] * h[i];
    }
  }
  if (delta < 0.0) delta = 0.0;  // cancellation guard near perfect fits
  return std::sqrt(delta / ref.norm_squared);
}

double mean_squared_error(const std::vector<double>& predictions,
                          const std::vector<double>& observations) {
  if (predictions.size() != observations.size())
    throw DataError("mse: size mismatch");
  if (predictions.empty()) throw DataError("mse of an empty test set");
  std::vector<double> sq(predictions.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = predictions[i] - observations[i];
    sq[i] = d * d;
  }
  return pairwise_sum(sq.data(), sq.size()) /
         static_cast<double>(sq.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile level not in [0,1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

int friedman_dimension(int which) {
  switch (which) {
    case 1:
      return 10;
    case 2:
    case 3:
      return 4;
    default:
      throw DataError("unknown benchmark index " + std::to_string(which));
  }
}

double friedman_noise_std(int which) {
  switch (which) {
    case 1:
      return 1.0;
    case 2:
      return 125.0;
    case 3:
      return 0.1;
    default:
      throw DataError("unknown benchmark index " + std::to_string(which));
  }
}

double friedman(int which, const double* x) {
  auto unit = [&](int i) { return 0.5 * (x[i] + 1.0); };
  if (which == 1) {
    const double t3 = unit(2) - 0.5;
    return 10.0 * std::sin(kPi * unit(0) * unit(1)) + 20.0 * t3 * t3 +
           10.0 * unit(3) + 5.0 * unit(4);
  }
  if (which != 2 && which != 3)
    throw DataError("unknown benchmark index " + std::to_string(which));
  const double s1 = 100.0 * unit(0);
  const double s2 = 520.0 * kPi * unit(1) + 40.0 * kPi;
  const double s3 = unit(2);
  const double s4 = 10.0 * unit(3) + 1.0;
  const double inner = s2 * s3 - 1.0 / (s2 * s4);
  if (which == 2) return std::sqrt(s1 * s1 + inner * inner);
  if (std::abs(s1) < 1e-12) {
    // x_1 = -1 maps to s1 = 0; take the arctangent limit
    return inner > 0.0 ? 0.5 * kPi : inner < 0.0 ? -0.5 * kPi : 0.0;
  }
  return std::atan(inner / s1);
}

namespace {

// Variables whose singleton index clears the screening threshold; falls
// back to all variables when nothing does, so the next stage still runs.
AnovaTermSet screened_order2_terms(const SensitivityReport& report,
                                   double screen, int d) {
  std::vector<int> kept;
  const auto& terms = report.term_set.terms;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    if (terms[t].size() == 1 && report.gsi[t] > screen)
      kept.push_back(terms[t][0]);
  }
  if (kept.empty()) {
    kept.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) kept[static_cast<std::size_t>(i)] = i + 1;
  }
  return build_superposition_term_set(d, 2, kept);
}

// The published active set each benchmark's reported model is fit on.
AnovaTermSet friedman_reference_set(int which) {
  if (which == 1)
    return make_term_set(10, {{1}, {2}, {3}, {4}, {5}, {1, 2}});
  if (which == 2) return make_term_set(4, {{2}, {3}, {2, 3}});
  return build_superposition_term_set(4, 2, {1, 2, 3});
}

}  // namespace

FriedmanSummary run_friedman_experiment(int which,
                                        const FriedmanOptions& opts) {
  const int d = friedman_dimension(which);
  const double sigma = friedman_noise_std(which);
  if (opts.repetitions < 1) throw DataError("need at least one repetition");
  if (opts.train_size < 2 || opts.test_size < 1)
    throw DataError("benchmark needs train and test nodes");

  FriedmanSummary summary;
  summary.which = which;
  summary.options = opts;
  summary.repetitions.resize(static_cast<std::size_t>(opts.repetitions));

  const int threads = resolve_threads(
      opts.threads, static_cast<std::size_t>(opts.repetitions));
  parallel_for(
      static_cast<std::size_t>(opts.repetitions), threads,
      [&](std::size_t idx) {
        const std::uint64_t rep_seed = opts.seed + idx + 1;
        SplitMix64 rng(rep_seed);
        Dataset train;
        train.nodes = sample_uniform_nodes(d, opts.train_size, rng);
        // The mse below is an unweighted average over uniform test nodes;
        // fit the plain system so the estimator minimizes that measure.
        train.nodes.density = NodeDensity::ChebyshevProduct;
        train.values.resize(opts.train_size);
        for (std::size_t j = 0; j < opts.train_size; ++j)
          train.values[j] = friedman(which, train.nodes.node(j));
        add_gaussian_noise(train.values, sigma, rng);

        const NodeSet test_nodes = sample_uniform_nodes(d, opts.test_size, rng);
        std::vector<double> test_values(opts.test_size);
        for (std::size_t j = 0; j < opts.test_size; ++j)
          test_values[j] = friedman(which, test_nodes.node(j));
        add_gaussian_noise(test_values, sigma, rng);

        const FitOptions fit_opts;
        AnovaTermSet stage_terms;
        std::vector<int> bands;
        double eps = 0.0;
        if (which == 1) {
          const FitReport screen = fit_initial(train, 2, {4, 2}, fit_opts);
          stage_terms =
              screened_order2_terms(analyze_model(screen.model), 0.02, d);
          bands = {4, 4};
          eps = 0.03;
        } else if (which == 2) {
          stage_terms = build_superposition_term_set(d, 2);
          bands = {2, 2};
          eps = 0.03;
        } else {
          stage_terms = build_superposition_term_set(d, 2);
          bands = {8, 2};
          eps = 0.002;
        }

        const FitReport stage =
            fit_term_set(train, stage_terms, bands, fit_opts, "detection fit");
        const DetectionResult det =
            detect_active_set(analyze_model(stage.model), {eps, eps});
        const FitReport final_fit =
            fit_term_set(train, friedman_reference_set(which), bands, fit_opts,
                         "reference-set fit");

        const std::vector<double> pred = evaluate_model(
            final_fit.model, test_nodes.coords, opts.test_size, 1);
        FriedmanRepetition& rec = summary.repetitions[idx];
        rec.seed = rep_seed;
        rec.mse = mean_squared_error(pred, test_values);
        rec.mse_zero_model = mean_squared_error(
            std::vector<double>(opts.test_size, 0.0), test_values);
        rec.train_error = train_error_l2(final_fit.model, train, 1);
        rec.detected = det.active;
      });

  std::vector<double> sorted;
  sorted.reserve(summary.repetitions.size());
  for (const auto& rec : summary.repetitions) sorted.push_back(rec.mse);
  std::sort(sorted.begin(), sorted.end());
  summary.median_mse = median(sorted);
  summary.lower_quartile_mse = quantile(sorted, 0.25);
  summary.upper_quartile_mse = quantile(sorted, 0.75);
  return summary;
}

namespace {

Dataset bspline_dataset(std::uint64_t seed, std::size_t count,
                        NodeDensity density) {
  SplitMix64 rng(seed);
  Dataset data;
  data.nodes = density == NodeDensity::ChebyshevProduct
                   ? sample_chebyshev_nodes(kBsplineDimension, count, rng)
                   : sample_uniform_nodes(kBsplineDimension, count, rng);
  data.values.resize(count);
  for (std::size_t j = 0; j < count; ++j)
    data.values[j] = bspline_test_function(data.nodes.node(j));
  return data;
}

BsplineFitRow make_bspline_row(const FitReport& fit, const Dataset& data,
                               const BsplineReference& ref, int n1, int n2) {
  BsplineFitRow row;
  row.n1 = n1;
  row.n2 = n2;
  row.index_count = fit.model.index_set.size();
  row.train_error = train_error_l2(fit.model, data, 1);
  row.generalization_error = generalization_error_l2(fit.model, ref);
  return row;
}

}  // namespace

BsplineDetectionSummary run_bspline_detection(
    const BsplineDetectionOptions& opts) {
  if (opts.repetitions < 1) throw DataError("need at least one repetition");
  if (opts.n1 < 2 || opts.n2 < 2)
    throw DataError("detection bandlimits must be >= 2");
  if (!(opts.eps > 0.0)) throw DataError("detection threshold must be > 0");

  const BsplineReference ref = bspline_reference(std::max(opts.n1, opts.n2));
  const AnovaTermSet truth = bspline_active_set();
  const AnovaTermSet all_order2 =
      build_superposition_term_set(kBsplineDimension, 2);

  BsplineDetectionSummary summary;
  summary.options = opts;
  summary.repetitions.resize(static_cast<std::size_t>(opts.repetitions));

  const int threads = resolve_threads(
      opts.threads, static_cast<std::size_t>(opts.repetitions));
  parallel_for(
      static_cast<std::size_t>(opts.repetitions), threads,
      [&](std::size_t idx) {
        const std::uint64_t rep_seed = opts.seed + idx + 1;
        const Dataset data =
            bspline_dataset(rep_seed, opts.node_count, opts.density);
        const FitOptions fit_opts;
        const FitReport fit = fit_term_set(data, all_order2,
                                           {opts.n1, opts.n2}, fit_opts,
                                           "detection fit");
        const SensitivityReport report = analyze_model(fit.model);
        const DetectionResult det =
            detect_active_set(report, {opts.eps, opts.eps});

        BsplineDetectionRepetition& rec = summary.repetitions[idx];
        rec.seed = rep_seed;
        rec.exact_recovery = det.active.terms == truth.terms;
        double min_true = std::numeric_limits<double>::infinity();
        double max_rest = 0.0;
        for (std::size_t t = 1; t < report.term_set.size(); ++t) {
          if (truth.contains(report.term_set.terms[t])) {
            min_true = std::min(min_true, report.gsi[t]);
          } else {
            max_rest = std::max(max_rest, report.gsi[t]);
          }
        }
        rec.separation = max_rest > 0.0
                             ? min_true / max_rest
                             : std::numeric_limits<double>::infinity();
        rec.train_error = train_error_l2(fit.model, data, 1);
        rec.generalization_error = generalization_error_l2(fit.model, ref);
      });

  summary.exact_count = 0;
  summary.min_separation = std::numeric_limits<double>::infinity();
  for (const auto& rec : summary.repetitions) {
    summary.exact_count += rec.exact_recovery ? 1 : 0;
    summary.min_separation = std::min(summary.min_separation, rec.separation);
  }
  return summary;
}

BsplineFitPair run_bspline_fit_pair(std::uint64_t seed, std::size_t node_count,
                                    NodeDensity density, int det_n1,
                                    int det_n2, int refit_n1, int refit_n2,
                                    int threads) {
  const Dataset data = bspline_dataset(seed, node_count, density);
  const BsplineReference ref = bspline_reference(
      std::max(std::max(det_n1, det_n2), std::max(refit_n1, refit_n2)));
  FitOptions fit_opts;
  fit_opts.plan.threads = threads;

  const FitReport det_fit = fit_term_set(
      data, build_superposition_term_set(kBsplineDimension, 2),
      {det_n1, det_n2}, fit_opts, "detection fit");
  const FitReport refit_fit =
      refit(data, bspline_active_set(), {refit_n1, refit_n2}, fit_opts, 2);

  BsplineFitPair pair;
  pair.detection = make_bspline_row(det_fit, data, ref, det_n1, det_n2);
  pair.refit = make_bspline_row(refit_fit, data, ref, refit_n1, refit_n2);
  return pair;
}

}  // namespace anovacheb
