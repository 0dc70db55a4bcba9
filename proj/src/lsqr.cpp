#include "anovacheb/lsqr.hpp"

#include <cmath>
#include <string>

#include "anovacheb/errors.hpp"
#include "anovacheb/rng.hpp"
#include "anovacheb/summation.hpp"

namespace anovacheb {

namespace {

double norm2(const std::vector<double>& v) {
  return std::sqrt(pairwise_dot(v.data(), v.data(), v.size()));
}

void scale(std::vector<double>& v, double a) {
  for (double& x : v) x *= a;
}

// Sign-aware Givens rotation: c*a + s*b = r with r >= 0 whenever b >= 0,
// so the residual recurrences below keep their meaning as norms.
void sym_ortho(double a, double b, double& c, double& s, double& r) {
  if (b == 0.0) {
    c = a >= 0.0 ? 1.0 : -1.0;
    s = 0.0;
    r = std::abs(a);
  } else if (a == 0.0) {
    c = 0.0;
    s = b >= 0.0 ? 1.0 : -1.0;
    r = std::abs(b);
  } else if (std::abs(b) > std::abs(a)) {
    const double tau = a / b;
    s = (b >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    c = s * tau;
    r = b / s;
  } else {
    const double tau = b / a;
    c = (a >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    s = c * tau;
    r = a / c;
  }
}

void adjoint_probe(const LinearOperator& A) {
  const std::size_t m = A.rows(), n = A.cols();
  SplitMix64 rng(0x414e4f56414ffULL);  // fixed seed, probe is deterministic
  std::vector<double> h(n), y(m), ah(m), aty(n);
  for (double& v : h) v = 2.0 * rng.uniform() - 1.0;
  for (double& v : y) v = 2.0 * rng.uniform() - 1.0;
  A.apply(h.data(), ah.data());
  A.apply_adjoint(y.data(), aty.data());
  const double lhs = pairwise_dot(ah.data(), y.data(), m);
  const double rhs = pairwise_dot(h.data(), aty.data(), n);
  const double scale_bound = norm2(ah) * norm2(y) + norm2(h) * norm2(aty);
  if (std::abs(lhs - rhs) > 1e-10 * scale_bound + 1e-300)
    throw NumericError(
        "lsqr: adjoint probe failed, <Ah,y> = " + std::to_string(lhs) +
        " vs <h,A^T y> = " + std::to_string(rhs));
}

}  // namespace

LsqrResult lsqr_solve(const LinearOperator& A, const std::vector<double>& b,
                      const LsqrConfig& cfg) {
  const std::size_t m = A.rows(), n = A.cols();
  if (b.size() != m) throw DataError("lsqr: right-hand side has wrong length");
  if (cfg.max_iterations < 1) throw DataError("lsqr: iteration cap must be >= 1");
  if (!(cfg.rel_tolerance >= 0.0) || !(cfg.damping >= 0.0))
    throw DataError("lsqr: tolerance and damping must be nonnegative");

  adjoint_probe(A);

  LsqrResult res;
  res.x.assign(n, 0.0);
  res.underdetermined = n > m;

  const double atol = cfg.rel_tolerance;
  const double btol = cfg.rel_tolerance;
  const double damp = cfg.damping;

  std::vector<double> u = b;
  double beta = norm2(u);
  const double normb = beta;
  if (beta == 0.0) {
    res.converged = true;
    res.stop = LsqrStop::ZeroRhs;
    return res;
  }
  scale(u, 1.0 / beta);

  std::vector<double> v(n), w(n), tmp_m(m), tmp_n(n);
  A.apply_adjoint(u.data(), v.data());
  double alpha = norm2(v);
  if (alpha == 0.0) {
    // b is orthogonal to the range; x = 0 is the least-squares solution.
    res.converged = true;
    res.stop = LsqrStop::NormalResidual;
    res.residual_norm = beta;
    return res;
  }
  scale(v, 1.0 / alpha);
  w = v;

  double phibar = beta;
  double rhobar = alpha;
  double normA2 = 0.0;
  double res2 = 0.0;  // accumulated squared residual moved off by damping

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    // Bidiagonalization step.
    A.apply(v.data(), tmp_m.data());
    for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) scale(u, 1.0 / beta);
    normA2 += alpha * alpha + beta * beta + damp * damp;

    A.apply_adjoint(u.data(), tmp_n.data());
    for (std::size_t i = 0; i < n; ++i) v[i] = tmp_n[i] - beta * v[i];
    alpha = norm2(v);
    if (alpha > 0.0) scale(v, 1.0 / alpha);

    // Eliminate the damping entry.
    double rhobar1 = rhobar;
    double psi = 0.0;
    if (damp > 0.0) {
      rhobar1 = std::sqrt(rhobar * rhobar + damp * damp);
      const double c1 = rhobar / rhobar1;
      const double s1 = damp / rhobar1;
      psi = s1 * phibar;
      phibar = c1 * phibar;
    }

    // Givens rotation on the bidiagonal.
    double c, s, rho;
    sym_ortho(rhobar1, beta, c, s, rho);
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += t1 * w[i];
      w[i] = v[i] + t2 * w[i];
    }

    res2 += psi * psi;
    const double damped_residual = std::sqrt(phibar * phibar + res2);
    const double normx = norm2(res.x);
    res.iterations = iter;
    res.residual_norm = std::sqrt(std::max(
        0.0, damped_residual * damped_residual - damp * damp * normx * normx));
    res.normal_residual_norm = alpha * std::abs(s * phi);
    const double normA = std::sqrt(normA2);

    if (damped_residual <= btol * normb + atol * normA * normx) {
      res.converged = true;
      res.stop = LsqrStop::Residual;
      break;
    }
    if (res.normal_residual_norm <=
        atol * normA * damped_residual + 1e-300) {
      res.converged = true;
      res.stop = LsqrStop::NormalResidual;
      break;
    }
  }
  return res;
}

}  // namespace anovacheb
