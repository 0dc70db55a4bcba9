// Command line surface over the fitting pipeline.  Subcommands: fit,
// gsi, refit, predict, bench, diag.  Reports are JSON with sorted keys
// (CSV for the benchmark tables on request), so equal runs produce
// byte-identical files.  Exit codes: 0 success, 2 usage, 3 data,
// 4 numeric, 5 resource.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "anovacheb/errors.hpp"
#include "anovacheb/index_set.hpp"
#include "anovacheb/model.hpp"
#include "anovacheb/node_set.hpp"
#include "anovacheb/pipeline.hpp"
#include "anovacheb/sensitivity.hpp"
#include "anovacheb/solver.hpp"
#include "anovacheb/term_set.hpp"
#include "anovacheb/testbench.hpp"
#include "anovacheb/transform.hpp"

using namespace anovacheb;
using nlohmann::json;

namespace {

// Options shared by the commands that run the solver.
struct SolverFlags {
  double theta = kDefaultTheta;
  int max_iter = 1000;
  double tol = 1e-8;
  int threads = 1;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--theta", f.theta,
                  "Interior padding for uniform-node rescaling");
  cmd->add_option("--max-iter", f.max_iter, "LSQR iteration cap");
  cmd->add_option("--tol", f.tol, "LSQR relative tolerance");
  cmd->add_option("--threads", f.threads, "Worker threads (transform level)")
      ->envname("ANOVACHEB_THREADS");
}

FitOptions to_fit_options(const SolverFlags& f) {
  FitOptions opts;
  opts.lsqr.max_iterations = f.max_iter;
  opts.lsqr.rel_tolerance = f.tol;
  opts.plan.threads = f.threads;
  opts.theta = f.theta;
  return opts;
}

NodeDensity parse_density(const std::string& name) {
  return name == "uniform" ? NodeDensity::Uniform
                           : NodeDensity::ChebyshevProduct;
}

// Writes to the path, or stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
  if (!out) throw DataError("failed writing output file: " + path);
}

json term_list(const std::vector<Term>& terms) { return json(terms); }

json fit_report_json(const char* command, const FitReport& report,
                     double train_error, const std::string& model_path) {
  json j;
  j["command"] = command;
  j["model_file"] = model_path;
  j["index_count"] = report.model.coefficients.size();
  j["train_error"] = train_error;
  j["iterations"] = report.model.iterations;
  j["converged"] = report.model.converged;
  j["residual_norm"] = report.model.residual_norm;
  j["underdetermined"] = report.underdetermined;
  j["size_advisory"] = report.size_advisory;
  j["size_ratio"] = report.size_ratio;
  j["note"] = report.model.note;
  return j;
}

// Coordinate-only input for predict: d numeric fields per line, with the
// same comment/blank-line tolerance as the dataset reader.
std::vector<double> read_points(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open points file: " + path);
  std::vector<double> coords;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (row.empty()) {
      std::string head;
      std::istringstream probe(line);
      probe >> head;
      if (head.empty() || head[0] == '#') continue;  // blank or comment
      if (first_content) {  // one header line tolerated
        first_content = false;
        continue;
      }
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": expected " + std::to_string(d) + " numbers");
    }
    first_content = false;
    if (row.size() != static_cast<std::size_t>(d))
      throw DataError(path + ": line " + std::to_string(lineno) + ": got " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(d));
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (coords.empty()) throw DataError(path + ": no points");
  return coords;
}

// ---------------------------------------------------------------------
// fit / refit

struct FitArgs {
  std::string input, output, report_path;
  int d = 0, ds = 1;
  std::vector<int> bandlimits;
  std::string density = "cheb";
  SolverFlags solver;
};

int run_fit(const FitArgs& a) {
  const Dataset data = read_dataset_file(a.input, a.d, parse_density(a.density));
  const FitReport report =
      fit_initial(data, a.ds, a.bandlimits, to_fit_options(a.solver));
  save_model_file(a.output, report.model);
  const double train = train_error_l2(report.model, data, a.solver.threads);
  emit(a.report_path,
       fit_report_json("fit", report, train, a.output).dump(2) + "\n");
  return 0;
}

struct RefitArgs {
  std::string input, model, output, report_path;
  std::vector<double> eps;
  std::vector<int> bandlimits;
  SolverFlags solver;
};

int run_refit(const RefitArgs& a) {
  const ApproximationModel prior = load_model_file(a.model);
  const Dataset data = read_dataset_file(
      a.input, prior.index_set.term_set.d, prior.density);
  const SensitivityReport sens = analyze_model(prior);
  const DetectionResult detected = detect_active_set(sens, a.eps);
  FitOptions opts = to_fit_options(a.solver);
  opts.theta = prior.theta > 0.0 ? prior.theta : opts.theta;
  const FitReport report =
      refit(data, detected.active, a.bandlimits, opts,
            prior.index_set.term_set.max_order());
  save_model_file(a.output, report.model);
  const double train = train_error_l2(report.model, data, a.solver.threads);
  json j = fit_report_json("refit", report, train, a.output);
  j["active_terms"] = term_list(detected.active.terms);
  j["closure_added"] = std::vector<bool>(detected.closure_added.begin(),
                                         detected.closure_added.end());
  emit(a.report_path, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------
// gsi

struct GsiArgs {
  std::string input, output;
  std::vector<double> eps;
};

int run_gsi(const GsiArgs& a) {
  const ApproximationModel model = load_model_file(a.input);
  const SensitivityReport report = analyze_model(model);
  json j;
  j["command"] = "gsi";
  j["d"] = report.term_set.d;
  j["total_variance"] = report.total_variance;
  json terms = json::array();
  for (std::size_t t = 0; t < report.term_set.size(); ++t) {
    json row;
    row["term"] = report.term_set.terms[t];
    row["variance"] = report.term_variance[t];
    row["gsi"] = report.gsi[t];
    terms.push_back(std::move(row));
  }
  j["terms"] = std::move(terms);
  if (!a.eps.empty()) {
    const DetectionResult detected = detect_active_set(report, a.eps);
    j["eps"] = a.eps;
    j["active_terms"] = term_list(detected.active.terms);
    j["closure_added"] = std::vector<bool>(detected.closure_added.begin(),
                                           detected.closure_added.end());
  }
  emit(a.output, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string input, model, output;
  int threads = 1;
};

int run_predict(const PredictArgs& a) {
  const ApproximationModel model = load_model_file(a.model);
  const int d = model.index_set.term_set.d;
  const std::vector<double> coords = read_points(a.input, d);
  const std::size_t n = coords.size() / static_cast<std::size_t>(d);
  const std::vector<double> values =
      evaluate_model(model, coords, n, a.threads);
  std::ostringstream out;
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  emit(a.output, out.str());
  return 0;
}

// ---------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string name, output;
  bool csv = false;
  int repetitions = 100;
  std::uint64_t seed = 202209;
  int threads = 0;
  // friedman sizes
  std::size_t train = 200, test = 1000;
  // bspline configuration
  std::size_t nodes = 10000;
  std::vector<int> bandlimits{20, 8};
  double eps = 0.005;
  std::string density = "cheb";
};

std::string friedman_csv(const FriedmanSummary& s) {
  std::ostringstream out;
  out << "rep,seed,mse,mse_zero_model,train_error\n";
  char buf[128];
  for (std::size_t r = 0; r < s.repetitions.size(); ++r) {
    const auto& rep = s.repetitions[r];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%.17g\n", r + 1,
                  static_cast<unsigned long long>(rep.seed), rep.mse,
                  rep.mse_zero_model, rep.train_error);
    out << buf;
  }
  return out.str();
}

std::string bspline_csv(const BsplineDetectionSummary& s) {
  std::ostringstream out;
  out << "rep,seed,exact_recovery,separation,train_error,generalization_error\n";
  char buf[160];
  for (std::size_t r = 0; r < s.repetitions.size(); ++r) {
    const auto& rep = s.repetitions[r];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%d,%.17g,%.17g,%.17g\n", r + 1,
                  static_cast<unsigned long long>(rep.seed),
                  rep.exact_recovery ? 1 : 0, rep.separation, rep.train_error,
                  rep.generalization_error);
    out << buf;
  }
  return out.str();
}

int run_bench(const BenchArgs& a) {
  if (a.name == "bspline") {
    BsplineDetectionOptions opts;
    opts.repetitions = a.repetitions;
    opts.node_count = a.nodes;
    opts.density = parse_density(a.density);
    if (a.bandlimits.size() != 2)
      throw DataError("bench bspline needs --N n1,n2");
    opts.n1 = a.bandlimits[0];
    opts.n2 = a.bandlimits[1];
    opts.eps = a.eps;
    opts.seed = a.seed;
    opts.threads = a.threads;
    const BsplineDetectionSummary s = run_bspline_detection(opts);
    if (a.csv) {
      emit(a.output, bspline_csv(s));
      return 0;
    }
    json j;
    j["benchmark"] = "bspline";
    j["repetitions"] = s.options.repetitions;
    j["node_count"] = s.options.node_count;
    j["N"] = {s.options.n1, s.options.n2};
    j["eps"] = s.options.eps;
    j["seed"] = s.options.seed;
    j["exact_count"] = s.exact_count;
    j["min_separation"] = s.min_separation;
    json reps = json::array();
    for (const auto& rep : s.repetitions) {
      json row;
      row["seed"] = rep.seed;
      row["exact_recovery"] = rep.exact_recovery;
      row["separation"] = rep.separation;
      row["train_error"] = rep.train_error;
      row["generalization_error"] = rep.generalization_error;
      reps.push_back(std::move(row));
    }
    j["reps"] = std::move(reps);
    emit(a.output, j.dump(2) + "\n");
    return 0;
  }

  const int which = a.name == "friedman1" ? 1 : a.name == "friedman2" ? 2 : 3;
  FriedmanOptions opts;
  opts.repetitions = a.repetitions;
  opts.train_size = a.train;
  opts.test_size = a.test;
  opts.seed = a.seed;
  opts.threads = a.threads;
  const FriedmanSummary s = run_friedman_experiment(which, opts);
  if (a.csv) {
    emit(a.output, friedman_csv(s));
    return 0;
  }
  json j;
  j["benchmark"] = a.name;
  j["repetitions"] = s.options.repetitions;
  j["train_size"] = s.options.train_size;
  j["test_size"] = s.options.test_size;
  j["seed"] = s.options.seed;
  j["median_mse"] = s.median_mse;
  j["lower_quartile_mse"] = s.lower_quartile_mse;
  j["upper_quartile_mse"] = s.upper_quartile_mse;
  json reps = json::array();
  for (const auto& rep : s.repetitions) {
    json row;
    row["seed"] = rep.seed;
    row["mse"] = rep.mse;
    row["mse_zero_model"] = rep.mse_zero_model;
    row["train_error"] = rep.train_error;
    row["detected_terms"] = term_list(rep.detected.terms);
    reps.push_back(std::move(row));
  }
  j["reps"] = std::move(reps);
  emit(a.output, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------
// diag

struct DiagArgs {
  std::string output;
  int d = 1, ds = 1;
  std::vector<int> bandlimits;
  std::size_t nodes = 2000;
  std::string density = "cheb";
  double theta = kDefaultTheta;
  double delta = 0.5;
  std::uint64_t seed = 202209;
};

int run_diag(const DiagArgs& a) {
  const GroupedIndexSet set = build_grouped_index_set_by_order(
      build_superposition_term_set(a.d, a.ds), a.bandlimits);
  SplitMix64 rng(a.seed);
  const NodeSet nodes = parse_density(a.density) == NodeDensity::Uniform
                            ? sample_uniform_nodes(a.d, a.nodes, rng)
                            : sample_chebyshev_nodes(a.d, a.nodes, rng);
  const SpectralDiagnostic diag =
      spectral_diagnostic(nodes, set, a.delta, a.theta);
  json j;
  j["command"] = "diag";
  j["d"] = a.d;
  j["ds"] = a.ds;
  j["N"] = a.bandlimits;
  j["density"] = a.density == "cheb" ? "chebyshev" : "uniform";
  j["node_count"] = diag.rows;
  j["index_count"] = diag.columns;
  j["seed"] = a.seed;
  j["min_singular"] = diag.min_singular;
  j["max_singular"] = diag.max_singular;
  j["band_low"] = diag.band_low;
  j["band_high"] = diag.band_high;
  j["inside_band"] = diag.inside_band;
  if (parse_density(a.density) == NodeDensity::Uniform) {
    j["delta"] = a.delta;
    j["theta"] = a.theta;
    j["gamma"] = diag.gamma;
    j["kappa"] = diag.kappa;
    j["stability_bound"] = diag.stability_bound;
    j["stability_condition"] = diag.stability_condition;
  }
  emit(a.output, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattered-data Chebyshev approximation toolkit"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit an expansion over all low-order terms");
  fit_cmd->add_option("--input", fit_args.input, "Dataset file")->required();
  fit_cmd->add_option("--output", fit_args.output, "Model file")->required();
  fit_cmd->add_option("--d", fit_args.d, "Dimension")->required();
  fit_cmd->add_option("--ds", fit_args.ds, "Maximum coupling order");
  fit_cmd->add_option("--N", fit_args.bandlimits, "Bandlimit per order")
      ->required()
      ->delimiter(',');
  fit_cmd->add_option("--density", fit_args.density, "Node density")
      ->check(CLI::IsMember({"cheb", "uniform"}));
  fit_cmd->add_option("--report", fit_args.report_path,
                      "Fit report file (default stdout)");
  add_solver_flags(fit_cmd, fit_args.solver);

  GsiArgs gsi_args;
  CLI::App* gsi_cmd = app.add_subcommand(
      "gsi", "Sensitivity report of a fitted model, optional threshold preview");
  gsi_cmd->add_option("--input", gsi_args.input, "Model file")->required();
  gsi_cmd->add_option("--output", gsi_args.output,
                      "Report file (default stdout)");
  gsi_cmd->add_option("--eps", gsi_args.eps, "Threshold per order")
      ->delimiter(',');

  RefitArgs refit_args;
  CLI::App* refit_cmd = app.add_subcommand(
      "refit", "Detect the active set of a fitted model and refit on it");
  refit_cmd->add_option("--input", refit_args.input, "Dataset file")
      ->required();
  refit_cmd->add_option("--model", refit_args.model, "Detection-stage model")
      ->required();
  refit_cmd->add_option("--eps", refit_args.eps, "Threshold per order")
      ->required()
      ->delimiter(',');
  refit_cmd->add_option("--N", refit_args.bandlimits, "Bandlimit per order")
      ->required()
      ->delimiter(',');
  refit_cmd->add_option("--output", refit_args.output, "Model file")
      ->required();
  refit_cmd->add_option("--report", refit_args.report_path,
                        "Fit report file (default stdout)");
  add_solver_flags(refit_cmd, refit_args.solver);

  PredictArgs predict_args;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Evaluate a saved model at given points");
  predict_cmd->add_option("--input", predict_args.input, "Points file")
      ->required();
  predict_cmd->add_option("--model", predict_args.model, "Model file")
      ->required();
  predict_cmd->add_option("--output", predict_args.output,
                          "Values file (default stdout)");
  predict_cmd->add_option("--threads", predict_args.threads, "Worker threads")
      ->envname("ANOVACHEB_THREADS");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Run a named benchmark with its published defaults");
  bench_cmd
      ->add_option("name", bench_args.name, "Benchmark name")
      ->required()
      ->check(CLI::IsMember({"bspline", "friedman1", "friedman2", "friedman3"}));
  bench_cmd->add_option("--repetitions", bench_args.repetitions,
                        "Repetition count");
  bench_cmd->add_option("--seed", bench_args.seed, "Base seed");
  bench_cmd->add_option("--threads", bench_args.threads,
                        "Threads across repetitions (0 = hardware)")
      ->envname("ANOVACHEB_THREADS");
  bench_cmd->add_option("--train", bench_args.train,
                        "Training size (friedman)");
  bench_cmd->add_option("--test", bench_args.test, "Test size (friedman)");
  bench_cmd->add_option("--nodes", bench_args.nodes, "Node count (bspline)");
  bench_cmd->add_option("--N", bench_args.bandlimits,
                        "Bandlimits n1,n2 (bspline)")
      ->delimiter(',');
  bench_cmd->add_option("--eps", bench_args.eps,
                        "Detection threshold (bspline)");
  bench_cmd->add_option("--density", bench_args.density,
                        "Node density (bspline)")
      ->check(CLI::IsMember({"cheb", "uniform"}));
  bench_cmd->add_option("--output", bench_args.output,
                        "Summary file (default stdout)");
  bench_cmd->add_flag("--csv", bench_args.csv, "Emit the table as CSV");

  DiagArgs diag_args;
  CLI::App* diag_cmd = app.add_subcommand(
      "diag", "Spectral diagnostic of a sampled design matrix");
  diag_cmd->add_option("--d", diag_args.d, "Dimension")->required();
  diag_cmd->add_option("--ds", diag_args.ds, "Maximum coupling order");
  diag_cmd->add_option("--N", diag_args.bandlimits, "Bandlimit per order")
      ->required()
      ->delimiter(',');
  diag_cmd->add_option("--nodes", diag_args.nodes, "Node count");
  diag_cmd->add_option("--density", diag_args.density, "Node density")
      ->check(CLI::IsMember({"cheb", "uniform"}));
  diag_cmd->add_option("--theta", diag_args.theta, "Rescaling padding");
  diag_cmd->add_option("--delta", diag_args.delta,
                       "Failure probability in the band inflation");
  diag_cmd->add_option("--seed", diag_args.seed, "Sampling seed");
  diag_cmd->add_option("--output", diag_args.output,
                       "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const char* stage = "run";
  try {
    if (fit_cmd->parsed()) {
      stage = "fit";
      return run_fit(fit_args);
    }
    if (gsi_cmd->parsed()) {
      stage = "gsi";
      return run_gsi(gsi_args);
    }
    if (refit_cmd->parsed()) {
      stage = "refit";
      return run_refit(refit_args);
    }
    if (predict_cmd->parsed()) {
      stage = "predict";
      return run_predict(predict_args);
    }
    if (bench_cmd->parsed()) {
      stage = "bench";
      return run_bench(bench_args);
    }
    stage = "diag";
    return run_diag(diag_args);
  } catch (const DataError& e) {
    std::fprintf(stderr, "%s: data error: %s\n", stage, e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "%s: numeric error: %s\n", stage, e.what());
    return 4;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "%s: resource error: %s\n", stage, e.what());
    return 5;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "%s: resource error: out of memory\n", stage);
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", stage, e.what());
    return 1;
  }
}
