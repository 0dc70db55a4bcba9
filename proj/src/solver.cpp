#include "anovacheb/solver.hpp"

#include <cmath>

#include "anovacheb/chebyshev.hpp"
#include "anovacheb/errors.hpp"

namespace anovacheb {

NodeSet scale_nodes(const NodeSet& nodes, double theta) {
  validate_node_set(nodes);
  if (nodes.theta != 0.0)
    throw DataError("scale nodes: set is already scaled");
  if (!(theta > 0.0) || theta >= 1.0)
    throw DataError("scale nodes: theta must lie in (0,1)");
  NodeSet scaled = nodes;
  scaled.theta = theta;
  for (double& c : scaled.coords) c *= 1.0 - theta;
  return scaled;
}

std::vector<double> sqrt_density_weights(const NodeSet& nodes) {
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    w[j] = std::sqrt(chebyshev_density(nodes.node(j), nodes.d));
  return w;
}

namespace {

class PlanOperator final : public LinearOperator {
 public:
  explicit PlanOperator(const GroupedTransformPlan& plan) : plan_(plan) {}
  std::size_t rows() const override { return plan_.rows(); }
  std::size_t cols() const override { return plan_.cols(); }
  void apply(const double* x, double* y) const override { plan_.apply(x, y); }
  void apply_adjoint(const double* y, double* x) const override {
    plan_.apply_adjoint(y, x);
  }

 private:
  const GroupedTransformPlan& plan_;
};

/// W F with diagonal row weights; the adjoint weights the residual before
/// handing it to the plan, keeping the pair an exact transpose.
class WeightedPlanOperator final : public LinearOperator {
 public:
  WeightedPlanOperator(const GroupedTransformPlan& plan,
                       const std::vector<double>& w)
      : plan_(plan), w_(w) {}
  std::size_t rows() const override { return plan_.rows(); }
  std::size_t cols() const override { return plan_.cols(); }
  void apply(const double* x, double* y) const override {
    plan_.apply(x, y);
    for (std::size_t j = 0; j < w_.size(); ++j) y[j] *= w_[j];
  }
  void apply_adjoint(const double* y, double* x) const override {
    std::vector<double> wy(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) wy[j] = w_[j] * y[j];
    plan_.apply_adjoint(wy.data(), x);
  }

 private:
  const GroupedTransformPlan& plan_;
  const std::vector<double>& w_;
};

SolveResult pack(LsqrResult&& r) {
  SolveResult out;
  out.coefficients = std::move(r.x);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.residual_norm = r.residual_norm;
  out.normal_residual_norm = r.normal_residual_norm;
  out.underdetermined = r.underdetermined;
  return out;
}

}  // namespace

SolveResult solve_chebyshev_nodes(const Dataset& data,
                                  const GroupedIndexSet& set,
                                  const LsqrConfig& cfg,
                                  const PlanOptions& plan_opts) {
  validate_dataset(data);
  if (data.nodes.density != NodeDensity::ChebyshevProduct)
    throw DataError("chebyshev solve: dataset is not Chebyshev-density");
  GroupedTransformPlan plan(data.nodes, set, plan_opts);
  PlanOperator op(plan);
  return pack(lsqr_solve(op, data.values, cfg));
}

SolveResult solve_uniform_nodes(const Dataset& data,
                                const GroupedIndexSet& set, double theta,
                                const LsqrConfig& cfg,
                                const PlanOptions& plan_opts) {
  validate_dataset(data);
  if (data.nodes.density != NodeDensity::Uniform)
    throw DataError("uniform solve: dataset is not uniform-density");
  const NodeSet scaled = scale_nodes(data.nodes, theta);
  const std::vector<double> w = sqrt_density_weights(scaled);
  GroupedTransformPlan plan(scaled, set, plan_opts);
  WeightedPlanOperator op(plan, w);
  std::vector<double> wy(data.values.size());
  for (std::size_t j = 0; j < wy.size(); ++j) wy[j] = w[j] * data.values[j];
  return pack(lsqr_solve(op, wy, cfg));
}

}  // namespace anovacheb
