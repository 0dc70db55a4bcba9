#pragma once

#include <cstddef>
#include <vector>

namespace anovacheb {

/// Matrix-free linear map; implementations must make apply/apply_adjoint
/// exact transposes of one another (the solver spot-checks this).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// y = A x (y has rows() entries, x cols()).
  virtual void apply(const double* x, double* y) const = 0;
  /// x = A^T y.
  virtual void apply_adjoint(const double* y, double* x) const = 0;
};

struct LsqrConfig {
  int max_iterations = 1000;
  double rel_tolerance = 1e-8;
  double damping = 0.0;
};

enum class LsqrStop {
  ZeroRhs,          // b = 0, x = 0 is exact
  Residual,         // residual criterion met
  NormalResidual,   // ||A^T r|| criterion met (least-squares convergence)
  IterationLimit,
};

struct LsqrResult {
  std::vector<double> x;
  int iterations = 0;
  bool converged = false;
  LsqrStop stop = LsqrStop::IterationLimit;
  double residual_norm = 0.0;  // estimate of ||b - A x||
  // Estimate of ||A^T (b - A x) - damping^2 x||, the gradient driven to
  // zero by the damped problem; with damping = 0 this is ||A^T r||.
  double normal_residual_norm = 0.0;
  bool underdetermined = false;       // cols > rows; flagged, not rejected
};

/// Damped least squares min ||A x - b||^2 + damping^2 ||x||^2 by the
/// Paige-Saunders bidiagonalization.  Starts with one deterministic
/// adjoint consistency probe (tolerance 1e-10) and throws NumericError if
/// apply and apply_adjoint disagree.  Residuals decrease monotonically,
/// so on hitting the iteration cap the last iterate is the best one; it
/// is returned with converged = false.
LsqrResult lsqr_solve(const LinearOperator& A, const std::vector<double>& b,
                      const LsqrConfig& cfg = {});

}  // namespace anovacheb
