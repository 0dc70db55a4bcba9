#include "anovacheb/transform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <string>

#include "anovacheb/chebyshev.hpp"
#include "anovacheb/errors.hpp"
#include "anovacheb/fft.hpp"
#include "anovacheb/parallel.hpp"
#include "anovacheb/summation.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace anovacheb {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

double term_scale(std::size_t order) {
  double s = 1.0;
  for (std::size_t i = 0; i < order; ++i) s *= kSqrt2;
  return s;
}

double bessel_i0(double x) {
  // Power series; converges to machine precision for the window's
  // argument range (x <= ~40) well before 80 terms.
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < 80; ++j) {
    term *= q / (static_cast<double>(j) * j);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

/// Kaiser-Bessel window on [-1,1], phi(z) = I0(beta sqrt(1-z^2)) / I0(beta),
/// evaluated through a Chebyshev interpolant in s = z^2.  The interpolant
/// reproduces the window to ~1e-15 and is what both the tap weights and the
/// deconvolution quadrature see, so the two stay exactly consistent.
struct Window {
  std::vector<double> coeff;  // Chebyshev series in t = 2s - 1

  double eval_s(double s) const {
    const double t = 2.0 * s - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = coeff.size(); i-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + coeff[i];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + coeff[0];
  }

  double eval(double z) const { return eval_s(z * z); }
};

Window build_window(double beta) {
  const int n = 64;
  const double inv_i0 = 1.0 / bessel_i0(beta);
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) {
    const double theta = (2.0 * i + 1.0) * kPi / (2.0 * n);
    const double s = 0.5 + 0.5 * std::cos(theta);
    const double arg = 1.0 - s;
    samples[i] = bessel_i0(beta * std::sqrt(arg > 0.0 ? arg : 0.0)) * inv_i0;
  }
  Window w;
  w.coeff.resize(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta = (2.0 * i + 1.0) * kPi / (2.0 * n);
      acc += samples[i] * std::cos(k * theta);
    }
    w.coeff[k] = (k == 0 ? 1.0 : 2.0) * acc / n;
  }
  while (w.coeff.size() > 8 && std::abs(w.coeff.back()) < 1e-16)
    w.coeff.pop_back();
  return w;
}

std::size_t pow2_at_least(std::size_t v) {
  std::size_t g = 1;
  while (g < v) g <<= 1;
  return g;
}

}  // namespace

/// Fast-path data for one tensor axis of one term.
struct GroupedTransformPlan::Axis {
  std::size_t grid = 0;              // G, power of two
  std::vector<double> deconv;        // 1/(2G c_k), k = 1..N-1
  std::vector<std::int32_t> tap_idx; // folded grid indices, node-major
  std::vector<double> tap_w;         // window weights, same layout
};

struct GroupedTransformPlan::TermData {
  Term u;
  std::vector<int> dims;  // 0-based copy of u
  int bandlimit = 1;
  int degrees = 0;        // bandlimit - 1
  TransformMode mode = TransformMode::Direct;
  int oversampling = 2;
  int taps = 6;
  std::vector<Axis> axes;  // fast mode only
};

GroupedTransformPlan::~GroupedTransformPlan() = default;
GroupedTransformPlan::GroupedTransformPlan(GroupedTransformPlan&&) noexcept =
    default;
GroupedTransformPlan& GroupedTransformPlan::operator=(
    GroupedTransformPlan&&) noexcept = default;

GroupedTransformPlan::GroupedTransformPlan(const NodeSet& nodes,
                                           GroupedIndexSet set,
                                           const PlanOptions& opts)
    : node_count_(nodes.size()), set_(std::move(set)) {
  validate_node_set(nodes);
  if (set_.term_set.d != nodes.d)
    throw DataError("transform plan: node dimension does not match term set");
  if (node_count_ == 0) throw DataError("transform plan: empty node set");
  if (opts.oversampling < 2)
    throw DataError("transform plan: oversampling must be >= 2");
  if (opts.taps < 2 || opts.taps > 16)
    throw DataError("transform plan: window cutoff outside [2,16]");
  threads_ = opts.threads;

  const int d = nodes.d;
  const std::size_t T = set_.term_set.size();
  term_data_.resize(T);

  // Pick each term's mode up front so the cosine tables cover exactly the
  // direct terms' needs.
  std::vector<int> max_direct_degree(d, 0);
  std::vector<char> dim_used(d, 0);
  for (std::size_t t = 0; t < T; ++t) {
    TermData& td = term_data_[t];
    td.u = set_.term_set.terms[t];
    td.bandlimit = set_.bandlimits[t];
    td.degrees = td.bandlimit - 1;
    td.oversampling = opts.oversampling;
    td.taps = opts.taps;
    for (int dim : td.u) td.dims.push_back(dim - 1);
    const std::size_t q = td.u.size();
    if (q == 0) {
      td.mode = TransformMode::Direct;
      continue;
    }
    if (opts.force_mode) {
      td.mode = *opts.force_mode;
      if (td.mode == TransformMode::Fast && q > 3)
        throw DataError(
            "transform plan: fast mode supports terms of order <= 3");
    } else if (q > 3) {
      td.mode = TransformMode::Direct;
    } else {
      double direct_cost = static_cast<double>(node_count_);
      for (std::size_t i = 0; i < q; ++i) direct_cost *= td.bandlimit;
      td.mode = direct_cost <= 16777216.0 ? TransformMode::Direct
                                          : TransformMode::Fast;
    }
    for (int dim : td.dims) {
      dim_used[dim] = 1;
      if (td.mode == TransformMode::Direct)
        max_direct_degree[dim] = std::max(max_direct_degree[dim], td.degrees);
    }
  }

  // Angles are cached once per used dimension.
  angles_.resize(d);
  for (int s = 0; s < d; ++s) {
    if (!dim_used[s]) continue;
    angles_[s].resize(node_count_);
    for (std::size_t j = 0; j < node_count_; ++j) {
      double x = nodes.coords[j * d + s];
      x = std::min(1.0, std::max(-1.0, x));
      angles_[s][j] = std::acos(x);
    }
  }

  // Cosine tables for the direct path, node-major: row j holds
  // cos(k theta_j) for k = 1..maxdeg, filled by the three-term recurrence.
  cos_table_.resize(d);
  cos_degrees_.assign(d, 0);
  std::size_t table_bytes = 0;
  for (int s = 0; s < d; ++s) {
    const int deg = max_direct_degree[s];
    cos_degrees_[s] = deg;
    if (deg == 0) continue;
    table_bytes += node_count_ * static_cast<std::size_t>(deg) * 8;
    if (table_bytes > (std::size_t{1} << 32))
      throw ResourceError("transform plan: cosine tables exceed 4 GiB");
    cos_table_[s].resize(node_count_ * static_cast<std::size_t>(deg));
    for (std::size_t j = 0; j < node_count_; ++j) {
      double* row = cos_table_[s].data() + j * deg;
      const double c = std::cos(angles_[s][j]);
      double prev2 = 1.0, prev1 = c;
      row[0] = c;
      for (int k = 2; k <= deg; ++k) {
        const double cur = 2.0 * c * prev1 - prev2;
        row[k - 1] = cur;
        prev2 = prev1;
        prev1 = cur;
      }
    }
  }

  for (std::size_t t = 0; t < T; ++t)
    if (term_data_[t].mode == TransformMode::Fast)
      build_term(t, nodes, opts);
}

void GroupedTransformPlan::build_term(std::size_t t, const NodeSet&,
                                      const PlanOptions& opts) {
  TermData& td = term_data_[t];
  const int m = opts.taps;
  const int tap_count = 2 * m + 1;
  const double half_width = m + 0.5;
  const std::size_t M = node_count_;

  for (int dim : td.dims) {
    Axis ax;
    ax.grid = pow2_at_least(std::max<std::size_t>(
        static_cast<std::size_t>(opts.oversampling) * td.degrees, 16));
    const std::size_t G = ax.grid;
    if ((static_cast<std::size_t>(tap_count) * M) > (std::size_t{1} << 28))
      throw ResourceError("transform plan: window tap storage too large");

    // Window sharpness follows the effective oversampling of this axis.
    const double sigma_inv = static_cast<double>(td.degrees) / G;
    const double beta = kPi * half_width * (2.0 - sigma_inv);
    const Window window = build_window(beta);

    // Fourier coefficients of the periodized window by Gauss-Legendre on
    // the (smooth) half support, c_k = (1/pi) int_0^A phi(x/A) cos(kx) dx.
    const double h = kPi / static_cast<double>(G);
    const double A = half_width * h;
    ax.deconv.resize(td.degrees);
    for (int k = 1; k <= td.degrees; ++k) {
      auto f = [&](double x) { return window.eval(x / A) * std::cos(k * x); };
      const double ck =
          boost::math::quadrature::gauss<double, 64>::integrate(f, 0.0, A) /
          kPi;
      ax.deconv[k - 1] = 1.0 / (2.0 * static_cast<double>(G) * ck);
    }

    // Tap indices (folded into [0,G] by even symmetry) and weights.
    ax.tap_idx.resize(M * tap_count);
    ax.tap_w.resize(M * tap_count);
    const std::vector<double>& theta = angles_[dim];
    for (std::size_t j = 0; j < M; ++j) {
      const double u = theta[j] / h;  // in [0, G]
      const long l0 = std::lround(u);
      for (int i = 0; i < tap_count; ++i) {
        const long l = l0 - m + i;
        long lf = l < 0 ? -l : l;
        if (lf > static_cast<long>(G)) lf = 2 * static_cast<long>(G) - lf;
        ax.tap_idx[j * tap_count + i] = static_cast<std::int32_t>(lf);
        ax.tap_w[j * tap_count + i] =
            window.eval((u - static_cast<double>(l)) / half_width);
      }
    }
    td.axes.push_back(std::move(ax));
  }
}

TermTransformPlan GroupedTransformPlan::term_plan(std::size_t t) const {
  const TermData& td = term_data_.at(t);
  TermTransformPlan p;
  p.u = td.u;
  p.bandlimit = td.bandlimit;
  p.mode = td.mode;
  p.oversampling = td.oversampling;
  p.taps = td.taps;
  for (const Axis& ax : td.axes) p.grids.push_back(ax.grid);
  return p;
}

namespace {

/// Applies the size-(dims[axis]) DCT-I along `axis` to every line whose
/// other-axis indices lie within `lo..hi` (inclusive, per axis).
void dct_pass(std::vector<double>& grid, const std::vector<std::size_t>& dims,
              const std::vector<std::size_t>& strides, std::size_t axis,
              const std::vector<std::size_t>& lo,
              const std::vector<std::size_t>& hi, std::vector<double>& line,
              std::vector<std::complex<double>>& scratch) {
  const std::size_t q = dims.size();
  const std::size_t len = dims[axis];
  const std::size_t stride = strides[axis];
  line.resize(len);
  std::vector<std::size_t> idx(q);
  for (std::size_t a = 0; a < q; ++a) idx[a] = (a == axis) ? 0 : lo[a];
  while (true) {
    std::size_t base = 0;
    for (std::size_t a = 0; a < q; ++a)
      if (a != axis) base += idx[a] * strides[a];
    for (std::size_t i = 0; i < len; ++i) line[i] = grid[base + i * stride];
    detail::dct1(line.data(), line.data(), len - 1, scratch);
    for (std::size_t i = 0; i < len; ++i) grid[base + i * stride] = line[i];
    // Odometer over the other axes.
    bool advanced = false;
    std::size_t a = q;
    while (a-- > 0) {
      if (a == axis) continue;
      if (idx[a] < hi[a]) {
        ++idx[a];
        advanced = true;
        break;
      }
      idx[a] = lo[a];
    }
    if (!advanced) break;
  }
}

}  // namespace

void GroupedTransformPlan::term_forward(std::size_t t, const double* block,
                                        double* out) const {
  const TermData& td = term_data_[t];
  const std::size_t q = td.u.size();
  const std::size_t M = node_count_;
  const double scale = term_scale(q);
  const int n = td.degrees;

  if (q == 0) {
    const double c = block[0];
    for (std::size_t j = 0; j < M; ++j) out[j] += c;
    return;
  }

  if (td.mode == TransformMode::Direct) {
    if (q == 1) {
      const int dim = td.dims[0];
      const int deg = cos_degrees_[dim];
      const double* tab = cos_table_[dim].data();
      for (std::size_t j = 0; j < M; ++j)
        out[j] += scale * pairwise_dot(block, tab + j * deg, n);
      return;
    }
    if (q == 2) {
      const int d0 = td.dims[0], d1 = td.dims[1];
      const int deg0 = cos_degrees_[d0], deg1 = cos_degrees_[d1];
      const double* tab0 = cos_table_[d0].data();
      const double* tab1 = cos_table_[d1].data();
      std::vector<double> acc(n);
      for (std::size_t j = 0; j < M; ++j) {
        const double* t0 = tab0 + j * deg0;
        const double* t1 = tab1 + j * deg1;
        for (int k = 0; k < n; ++k)
          acc[k] = pairwise_dot(block + static_cast<std::size_t>(k) * n, t1,
                                n);
        out[j] += scale * pairwise_dot(acc.data(), t0, n);
      }
      return;
    }
    if (q == 3) {
      const int d0 = td.dims[0], d1 = td.dims[1], d2 = td.dims[2];
      const double* tab0 = cos_table_[d0].data();
      const double* tab1 = cos_table_[d1].data();
      const double* tab2 = cos_table_[d2].data();
      const int deg0 = cos_degrees_[d0], deg1 = cos_degrees_[d1],
                deg2 = cos_degrees_[d2];
      std::vector<double> acc1(n), acc2(n);
      for (std::size_t j = 0; j < M; ++j) {
        const double* t0 = tab0 + j * deg0;
        const double* t1 = tab1 + j * deg1;
        const double* t2 = tab2 + j * deg2;
        for (int k0 = 0; k0 < n; ++k0) {
          for (int k1 = 0; k1 < n; ++k1)
            acc2[k1] = pairwise_dot(
                block + (static_cast<std::size_t>(k0) * n + k1) * n, t2, n);
          acc1[k0] = pairwise_dot(acc2.data(), t1, n);
        }
        out[j] += scale * pairwise_dot(acc1.data(), t0, n);
      }
      return;
    }
    // Generic contraction for order >= 4 (rare; kept simple).
    std::vector<const double*> rows(q);
    std::vector<std::size_t> strides(q);
    strides[q - 1] = 1;
    for (std::size_t a = q - 1; a-- > 0;)
      strides[a] = strides[a + 1] * static_cast<std::size_t>(n);
    struct Rec {
      const std::vector<const double*>& rows;
      const std::vector<std::size_t>& strides;
      int n;
      std::size_t q;
      double operator()(const double* c, std::size_t level) const {
        if (level == q) return c[0];
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          s += rows[level][k] * (*this)(c + k * strides[level], level + 1);
        return s;
      }
    };
    for (std::size_t j = 0; j < M; ++j) {
      for (std::size_t a = 0; a < q; ++a)
        rows[a] = cos_table_[td.dims[a]].data() +
                  j * static_cast<std::size_t>(cos_degrees_[td.dims[a]]);
      Rec rec{rows, strides, n, q};
      out[j] += scale * rec(block, 0);
    }
    return;
  }

  // Fast path: deconvolve into the oversampled spectrum, tensor DCT-I,
  // then gather through the window taps.
  std::vector<std::size_t> dims(q), strides(q);
  for (std::size_t a = 0; a < q; ++a) dims[a] = td.axes[a].grid + 1;
  strides[q - 1] = 1;
  for (std::size_t a = q - 1; a-- > 0;) strides[a] = strides[a + 1] * dims[a + 1];
  std::vector<double> grid(strides[0] * dims[0], 0.0);

  {
    std::vector<int> k(q, 1);
    std::size_t bi = 0;
    while (true) {
      double v = block[bi] * scale;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < q; ++a) {
        v *= td.axes[a].deconv[k[a] - 1];
        flat += static_cast<std::size_t>(k[a]) * strides[a];
      }
      grid[flat] = v;
      ++bi;
      std::size_t a = q;
      bool done = true;
      while (a-- > 0) {
        if (k[a] < n) {
          ++k[a];
          done = false;
          break;
        }
        k[a] = 1;
      }
      if (done) break;
    }
  }

  std::vector<double> line;
  std::vector<std::complex<double>> scratch;
  std::vector<std::size_t> lo(q), hi(q);
  for (std::size_t pass = q; pass-- > 0;) {
    for (std::size_t a = 0; a < q; ++a) {
      if (a < pass) {
        lo[a] = 1;
        hi[a] = static_cast<std::size_t>(n);
      } else {
        lo[a] = 0;
        hi[a] = dims[a] - 1;
      }
    }
    dct_pass(grid, dims, strides, pass, lo, hi, line, scratch);
  }

  const int tap_count = 2 * td.taps + 1;
  if (q == 1) {
    const Axis& ax = td.axes[0];
    for (std::size_t j = 0; j < M; ++j) {
      const std::int32_t* idx = ax.tap_idx.data() + j * tap_count;
      const double* w = ax.tap_w.data() + j * tap_count;
      double v = 0.0;
      for (int i = 0; i < tap_count; ++i) v += w[i] * grid[idx[i]];
      out[j] += v;
    }
  } else if (q == 2) {
    const Axis& a0 = td.axes[0];
    const Axis& a1 = td.axes[1];
    const std::size_t s0 = strides[0];
    for (std::size_t j = 0; j < M; ++j) {
      const std::int32_t* i0 = a0.tap_idx.data() + j * tap_count;
      const double* w0 = a0.tap_w.data() + j * tap_count;
      const std::int32_t* i1 = a1.tap_idx.data() + j * tap_count;
      const double* w1 = a1.tap_w.data() + j * tap_count;
      double v = 0.0;
      for (int p = 0; p < tap_count; ++p) {
        const double* row = grid.data() + static_cast<std::size_t>(i0[p]) * s0;
        double inner = 0.0;
        for (int r = 0; r < tap_count; ++r) inner += w1[r] * row[i1[r]];
        v += w0[p] * inner;
      }
      out[j] += v;
    }
  } else {
    const Axis& a0 = td.axes[0];
    const Axis& a1 = td.axes[1];
    const Axis& a2 = td.axes[2];
    const std::size_t s0 = strides[0], s1 = strides[1];
    for (std::size_t j = 0; j < M; ++j) {
      const std::int32_t* i0 = a0.tap_idx.data() + j * tap_count;
      const double* w0 = a0.tap_w.data() + j * tap_count;
      const std::int32_t* i1 = a1.tap_idx.data() + j * tap_count;
      const double* w1 = a1.tap_w.data() + j * tap_count;
      const std::int32_t* i2 = a2.tap_idx.data() + j * tap_count;
      const double* w2 = a2.tap_w.data() + j * tap_count;
      double v = 0.0;
      for (int p = 0; p < tap_count; ++p) {
        double mid = 0.0;
        for (int r = 0; r < tap_count; ++r) {
          const double* row = grid.data() +
                              static_cast<std::size_t>(i0[p]) * s0 +
                              static_cast<std::size_t>(i1[r]) * s1;
          double inner = 0.0;
          for (int s = 0; s < tap_count; ++s) inner += w2[s] * row[i2[s]];
          mid += w1[r] * inner;
        }
        v += w0[p] * mid;
      }
      out[j] += v;
    }
  }
}

void GroupedTransformPlan::term_adjoint(std::size_t t, const double* residual,
                                        double* block) const {
  const TermData& td = term_data_[t];
  const std::size_t q = td.u.size();
  const std::size_t M = node_count_;
  const double scale = term_scale(q);
  const int n = td.degrees;

  if (q == 0) {
    block[0] = pairwise_sum(residual, M);
    return;
  }

  if (td.mode == TransformMode::Direct) {
    const std::size_t block_len = set_.block_size(t);
    std::fill(block, block + block_len, 0.0);
    if (q == 1) {
      const int dim = td.dims[0];
      const int deg = cos_degrees_[dim];
      const double* tab = cos_table_[dim].data();
      for (std::size_t j = 0; j < M; ++j) {
        const double w = scale * residual[j];
        const double* row = tab + j * deg;
        for (int k = 0; k < n; ++k) block[k] += w * row[k];
      }
      return;
    }
    if (q == 2) {
      const int d0 = td.dims[0], d1 = td.dims[1];
      const int deg0 = cos_degrees_[d0], deg1 = cos_degrees_[d1];
      const double* tab0 = cos_table_[d0].data();
      const double* tab1 = cos_table_[d1].data();
      for (std::size_t j = 0; j < M; ++j) {
        const double w = scale * residual[j];
        const double* t0 = tab0 + j * deg0;
        const double* t1 = tab1 + j * deg1;
        for (int k0 = 0; k0 < n; ++k0) {
          const double f = w * t0[k0];
          double* row = block + static_cast<std::size_t>(k0) * n;
          for (int k1 = 0; k1 < n; ++k1) row[k1] += f * t1[k1];
        }
      }
      return;
    }
    if (q == 3) {
      const int d0 = td.dims[0], d1 = td.dims[1], d2 = td.dims[2];
      const int deg0 = cos_degrees_[d0], deg1 = cos_degrees_[d1],
                deg2 = cos_degrees_[d2];
      const double* tab0 = cos_table_[d0].data();
      const double* tab1 = cos_table_[d1].data();
      const double* tab2 = cos_table_[d2].data();
      for (std::size_t j = 0; j < M; ++j) {
        const double w = scale * residual[j];
        const double* t0 = tab0 + j * deg0;
        const double* t1 = tab1 + j * deg1;
        const double* t2 = tab2 + j * deg2;
        for (int k0 = 0; k0 < n; ++k0) {
          const double f0 = w * t0[k0];
          for (int k1 = 0; k1 < n; ++k1) {
            const double f1 = f0 * t1[k1];
            double* row =
                block + (static_cast<std::size_t>(k0) * n + k1) * n;
            for (int k2 = 0; k2 < n; ++k2) row[k2] += f1 * t2[k2];
          }
        }
      }
      return;
    }
    // Generic order >= 4.
    std::vector<std::size_t> strides(q);
    strides[q - 1] = 1;
    for (std::size_t a = q - 1; a-- > 0;)
      strides[a] = strides[a + 1] * static_cast<std::size_t>(n);
    std::vector<int> k(q, 1);
    for (std::size_t j = 0; j < M; ++j) {
      const double w = scale * residual[j];
      std::fill(k.begin(), k.end(), 1);
      std::size_t bi = 0;
      while (true) {
        double v = w;
        for (std::size_t a = 0; a < q; ++a) {
          const int dim = td.dims[a];
          v *= cos_table_[dim][j * static_cast<std::size_t>(
                                       cos_degrees_[dim]) +
                               (k[a] - 1)];
        }
        block[bi] += v;
        ++bi;
        std::size_t a = q;
        bool done = true;
        while (a-- > 0) {
          if (k[a] < n) {
            ++k[a];
            done = false;
            break;
          }
          k[a] = 1;
        }
        if (done) break;
      }
    }
    return;
  }

  // Fast path, exact transpose of the forward chain: spread through the
  // taps, tensor DCT-I (symmetric), gather the deconvolved corner box.
  std::vector<std::size_t> dims(q), strides(q);
  for (std::size_t a = 0; a < q; ++a) dims[a] = td.axes[a].grid + 1;
  strides[q - 1] = 1;
  for (std::size_t a = q - 1; a-- > 0;) strides[a] = strides[a + 1] * dims[a + 1];
  std::vector<double> grid(strides[0] * dims[0], 0.0);

  const int tap_count = 2 * td.taps + 1;
  if (q == 1) {
    const Axis& ax = td.axes[0];
    for (std::size_t j = 0; j < M; ++j) {
      const double r = residual[j];
      const std::int32_t* idx = ax.tap_idx.data() + j * tap_count;
      const double* w = ax.tap_w.data() + j * tap_count;
      for (int i = 0; i < tap_count; ++i) grid[idx[i]] += r * w[i];
    }
  } else if (q == 2) {
    const Axis& a0 = td.axes[0];
    const Axis& a1 = td.axes[1];
    const std::size_t s0 = strides[0];
    for (std::size_t j = 0; j < M; ++j) {
      const double r = residual[j];
      const std::int32_t* i0 = a0.tap_idx.data() + j * tap_count;
      const double* w0 = a0.tap_w.data() + j * tap_count;
      const std::int32_t* i1 = a1.tap_idx.data() + j * tap_count;
      const double* w1 = a1.tap_w.data() + j * tap_count;
      for (int p = 0; p < tap_count; ++p) {
        const double f = r * w0[p];
        double* row = grid.data() + static_cast<std::size_t>(i0[p]) * s0;
        for (int rr = 0; rr < tap_count; ++rr) row[i1[rr]] += f * w1[rr];
      }
    }
  } else {
    const Axis& a0 = td.axes[0];
    const Axis& a1 = td.axes[1];
    const Axis& a2 = td.axes[2];
    const std::size_t s0 = strides[0], s1 = strides[1];
    for (std::size_t j = 0; j < M; ++j) {
      const double r = residual[j];
      const std::int32_t* i0 = a0.tap_idx.data() + j * tap_count;
      const double* w0 = a0.tap_w.data() + j * tap_count;
      const std::int32_t* i1 = a1.tap_idx.data() + j * tap_count;
      const double* w1 = a1.tap_w.data() + j * tap_count;
      const std::int32_t* i2 = a2.tap_idx.data() + j * tap_count;
      const double* w2 = a2.tap_w.data() + j * tap_count;
      for (int p = 0; p < tap_count; ++p) {
        const double f0 = r * w0[p];
        for (int rr = 0; rr < tap_count; ++rr) {
          const double f1 = f0 * w1[rr];
          double* row = grid.data() + static_cast<std::size_t>(i0[p]) * s0 +
                        static_cast<std::size_t>(i1[rr]) * s1;
          for (int s = 0; s < tap_count; ++s) row[i2[s]] += f1 * w2[s];
        }
      }
    }
  }

  std::vector<double> line;
  std::vector<std::complex<double>> scratch;
  std::vector<std::size_t> lo(q), hi(q);
  for (std::size_t pass = 0; pass < q; ++pass) {
    for (std::size_t a = 0; a < q; ++a) {
      if (a < pass) {
        lo[a] = 1;
        hi[a] = static_cast<std::size_t>(n);
      } else {
        lo[a] = 0;
        hi[a] = dims[a] - 1;
      }
    }
    dct_pass(grid, dims, strides, pass, lo, hi, line, scratch);
  }

  {
    std::vector<int> k(q, 1);
    std::size_t bi = 0;
    while (true) {
      double v = scale;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < q; ++a) {
        v *= td.axes[a].deconv[k[a] - 1];
        flat += static_cast<std::size_t>(k[a]) * strides[a];
      }
      block[bi] = v * grid[flat];
      ++bi;
      std::size_t a = q;
      bool done = true;
      while (a-- > 0) {
        if (k[a] < n) {
          ++k[a];
          done = false;
          break;
        }
        k[a] = 1;
      }
      if (done) break;
    }
  }
}

void GroupedTransformPlan::apply(const double* coeffs, double* out) const {
  const std::size_t M = node_count_;
  const std::size_t T = term_data_.size();
  std::fill(out, out + M, 0.0);
  const int threads = resolve_threads(threads_, T);
  if (threads <= 1) {
    for (std::size_t t = 0; t < T; ++t)
      term_forward(t, coeffs + set_.offsets[t], out);
    return;
  }
  std::vector<std::vector<double>> buf(T);
  parallel_for(T, threads, [&](std::size_t t) {
    buf[t].assign(M, 0.0);
    term_forward(t, coeffs + set_.offsets[t], buf[t].data());
  });
  // Same accumulation order as the serial path, so the result is
  // bit-identical for every thread count.
  for (std::size_t t = 0; t < T; ++t) {
    const double* b = buf[t].data();
    for (std::size_t j = 0; j < M; ++j) out[j] += b[j];
  }
}

void GroupedTransformPlan::apply_adjoint(const double* residual,
                                         double* out) const {
  const std::size_t T = term_data_.size();
  const int threads = resolve_threads(threads_, T);
  if (threads <= 1) {
    for (std::size_t t = 0; t < T; ++t)
      term_adjoint(t, residual, out + set_.offsets[t]);
    return;
  }
  parallel_for(T, threads, [&](std::size_t t) {
    term_adjoint(t, residual, out + set_.offsets[t]);
  });
}

double evaluate_dense(const GroupedIndexSet& set, const double* coeffs,
                      const double* x) {
  const auto indices = enumerate_indices(set);
  double v = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    v += coeffs[i] * chebyshev_basis(indices[i], x);
  return v;
}

}  // namespace anovacheb
