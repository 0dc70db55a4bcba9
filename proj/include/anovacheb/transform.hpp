#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "anovacheb/index_set.hpp"
#include "anovacheb/node_set.hpp"

namespace anovacheb {

enum class TransformMode { Direct, Fast };

struct PlanOptions {
  /// Force every term onto one path; unset picks per term by cost.
  std::optional<TransformMode> force_mode;
  /// Oversampling factor for the fast path's regular grid (>= 2).  The
  /// grid size is the next power of two at or above oversampling*(N-1).
  int oversampling = 2;
  /// Window cutoff: 2*taps+1 grid points carry each node's weight.
  int taps = 6;
  /// Term-level parallelism inside apply/apply_adjoint.
  int threads = 1;
};

/// Descriptive view of one term's plan.
struct TermTransformPlan {
  Term u;
  int bandlimit = 1;
  TransformMode mode = TransformMode::Direct;
  int oversampling = 2;
  int taps = 6;
  /// Regular-grid size per axis (fast mode only).
  std::vector<std::size_t> grids;
};

/// Precomputed application of the grouped basis matrix F = [F_1 ... F_T]
/// for a fixed node set and grouped index set.  Construction caches the
/// per-node arccos angles once per dimension, cosine tables for the direct
/// terms and window taps plus deconvolution factors for the fast terms.
/// The plan is immutable after construction; apply/apply_adjoint are const
/// and safe to call concurrently from different solver instances.
class GroupedTransformPlan {
 public:
  GroupedTransformPlan(const NodeSet& nodes, GroupedIndexSet set,
                       const PlanOptions& opts = {});
  // Out of line: TermData is incomplete here.
  ~GroupedTransformPlan();
  GroupedTransformPlan(GroupedTransformPlan&&) noexcept;
  GroupedTransformPlan& operator=(GroupedTransformPlan&&) noexcept;
  GroupedTransformPlan(const GroupedTransformPlan&) = delete;
  GroupedTransformPlan& operator=(const GroupedTransformPlan&) = delete;

  std::size_t rows() const { return node_count_; }
  std::size_t cols() const { return set_.size(); }
  const GroupedIndexSet& index_set() const { return set_; }
  std::size_t term_count() const { return set_.term_set.size(); }
  TermTransformPlan term_plan(std::size_t t) const;

  /// out = F coeffs (out has rows() entries, coeffs cols() entries).
  /// Per-term contributions are computed independently (in parallel when
  /// the plan was built with threads > 1) and reduced in term order, so
  /// the result does not depend on the thread count.
  void apply(const double* coeffs, double* out) const;

  /// out = F^T residual (residual rows(), out cols()).  Term blocks are
  /// disjoint, so term-level parallelism needs no reduction step.
  void apply_adjoint(const double* residual, double* out) const;

  /// Adds term t's contribution, F_t block, into out (rows() entries).
  /// `block` points at the term's coefficients (block_size(t) entries).
  void term_forward(std::size_t t, const double* block, double* out) const;

  /// Writes F_t^T residual into block (block_size(t) entries).
  void term_adjoint(std::size_t t, const double* residual,
                    double* block) const;

 private:
  struct Axis;
  struct TermData;

  void build_term(std::size_t t, const NodeSet& nodes,
                  const PlanOptions& opts);

  std::size_t node_count_ = 0;
  GroupedIndexSet set_;
  int threads_ = 1;
  std::vector<std::vector<double>> angles_;     // per dimension, size M or 0
  std::vector<std::vector<double>> cos_table_;  // per dimension, node-major
  std::vector<int> cos_degrees_;                // columns in cos_table_[s]
  std::vector<TermData> term_data_;
};

/// Scalar oracle-style evaluation of the whole expansion at one point:
/// sum over the index set of coeff * basis.  Slow; intended for tests and
/// tiny problems.
double evaluate_dense(const GroupedIndexSet& set, const double* coeffs,
                      const double* x);

}  // namespace anovacheb
