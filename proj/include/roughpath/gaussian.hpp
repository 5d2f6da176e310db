#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "roughpath/contract.hpp"
#include "roughpath/grid2d.hpp"
#include "roughpath/path.hpp"
#include "roughpath/rng.hpp"

namespace roughpath {

// Centred Gaussian driver on [0,1] with i.i.d. components: Brownian motion
// or fractional Brownian motion with Hurst parameter H in (1/4, 1/2].
// Brownian motion is fBM with H = 1/2 on the nose, R(s,t) = min(s,t).
struct CovarianceModel {
  enum class Kind { kBrownian, kFractionalBrownian };

  Kind kind = Kind::kBrownian;
  double hurst = 0.5;
  int dimension = 1;

  static CovarianceModel brownian(int dim) {
    CovarianceModel m;
    m.kind = Kind::kBrownian;
    m.hurst = 0.5;
    m.dimension = dim;
    m.validate();
    return m;
  }

  static CovarianceModel fractional(double hurst, int dim) {
    CovarianceModel m;
    m.kind = Kind::kFractionalBrownian;
    m.hurst = hurst;
    m.dimension = dim;
    m.validate();
    return m;
  }

  void validate() const {
    require(dimension >= 1, "CovarianceModel: dimension must be >= 1");
    if (kind == Kind::kFractionalBrownian)
      require(hurst > 0.25 && hurst <= 0.5, "CovarianceModel: Hurst parameter must be in (1/4, 1/2]");
  }

  // rho = 1/(2H); the 2D rho-variation exponent of the covariance.
  double rho() const { return kind == Kind::kBrownian ? 1.0 : 1.0 / (2.0 * hurst); }
};

// R(s,t) for one component. The H = 1/2 branch returns min(s,t) directly so
// that fBM with H = 1/2 matches Brownian motion exactly, not up to rounding.
inline double covariance(const CovarianceModel& model, double s, double t) {
  if (model.kind == CovarianceModel::Kind::kBrownian || model.hurst == 0.5)
    return std::min(s, t);
  const double two_h = 2.0 * model.hurst;
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

// Rectangular increment R([s,t] x [u,v]) = E[X_{s,t} X_{u,v}]. Degenerate
// rectangles give exactly zero, not a rounding residue.
inline double rect_increment(const CovarianceModel& model, double s, double t, double u, double v) {
  require(s <= t && u <= v, "rect_increment: need s <= t and u <= v");
  if (s == t || u == v) return 0.0;
  return covariance(model, t, v) - covariance(model, t, u) - covariance(model, s, v) +
         covariance(model, s, u);
}

// Covariance restricted to a finite grid.
struct GridCovariance {
  std::vector<double> times;
  std::vector<double> r;  // row-major times.size()^2, symmetric

  double at(std::size_t i, std::size_t j) const { return r[i * times.size() + j]; }

  GridFunction2D to_grid_function() const {
    GridFunction2D g;
    g.xs = times;
    g.ys = times;
    g.v = r;
    return g;
  }
};

inline GridCovariance grid_covariance(const CovarianceModel& model, std::vector<double> times) {
  GridCovariance g;
  g.times = std::move(times);
  const std::size_t n = g.times.size();
  g.r.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = covariance(model, g.times[i], g.times[j]);
      g.r[i * n + j] = v;
      g.r[j * n + i] = v;
    }
  return g;
}

namespace detail {

// In-place dense Cholesky A = L L^T (lower triangle). Returns false when a
// pivot is not strictly positive.
inline bool cholesky_in_place(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    const double* rowj = &a[j * n];
    for (std::size_t k = 0; k < j; ++k) d -= rowj[k] * rowj[k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    const double inv = 1.0 / ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      const double* rowi = &a[i * n];
      for (std::size_t k = 0; k < j; ++k) s -= rowi[k] * rowj[k];
      a[i * n + j] = s * inv;
    }
  }
  // zero the strict upper triangle so the factor can be used directly
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  return true;
}

}  // namespace detail

// Lower-triangular factor of a grid covariance, with diagonal jitter
// escalation 1e-12*trace .. 1e-10*trace when the plain factorization fails.
class CholeskyFactor {
 public:
  static CholeskyFactor compute(const std::vector<double>& matrix, std::size_t n) {
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += matrix[i * n + i];
    const double scales[] = {0.0, 1e-12, 1e-11, 1e-10};
    for (double s : scales) {
      CholeskyFactor f;
      f.n_ = n;
      f.jitter_ = s * trace;
      f.l_ = matrix;
      for (std::size_t i = 0; i < n; ++i) f.l_[i * n + i] += f.jitter_;
      if (detail::cholesky_in_place(f.l_, n)) return f;
    }
    require_numeric(false, "CholeskyFactor: factorization failed even with 1e-10*trace jitter");
    return {};
  }

  std::size_t size() const { return n_; }
  double jitter() const { return jitter_; }
  double at(std::size_t i, std::size_t j) const { return l_[i * n_ + j]; }

  // out = L z
  void apply(const std::vector<double>& z, std::vector<double>& out) const {
    out.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = &l_[i * n_];
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
      out[i] = s;
    }
  }

 private:
  std::size_t n_ = 0;
  double jitter_ = 0.0;
  std::vector<double> l_;
};

// Exact Gaussian sampling on the uniform grid {j/k : j = 0..k}: the grid
// covariance over the positive times is factored once, and trajectory tau,
// component c is L z with z the Philox stream keyed by (seed, tau, c). The
// sampler is immutable after construction and safe to share across threads;
// outputs depend only on (seed, trajectory, component), never on scheduling.
class GaussianSampler {
 public:
  GaussianSampler(const CovarianceModel& model, std::size_t mesh, std::uint64_t seed)
      : model_(model), mesh_(mesh), seed_(seed) {
    require(mesh >= 1, "GaussianSampler: mesh must be >= 1");
    model.validate();
    std::vector<double> pos_times(mesh);
    for (std::size_t j = 1; j <= mesh; ++j)
      pos_times[j - 1] = static_cast<double>(j) / static_cast<double>(mesh);
    const GridCovariance cov = grid_covariance(model_, pos_times);
    factor_ = CholeskyFactor::compute(cov.r, mesh);
  }

  const CovarianceModel& model() const { return model_; }
  std::size_t mesh() const { return mesh_; }
  const CholeskyFactor& factor() const { return factor_; }

  SampledPath sample(std::uint32_t trajectory) const {
    SampledPath p = uniform_grid_path(model_.dimension, mesh_);
    std::vector<double> z, x;
    for (int c = 0; c < model_.dimension; ++c) {
      GaussianStream stream(seed_, trajectory, static_cast<std::uint32_t>(c));
      stream.fill_normals(z, mesh_);
      factor_.apply(z, x);
      for (std::size_t j = 1; j <= mesh_; ++j) p.value(j, c) = x[j - 1];
    }
    return p;
  }

 private:
  CovarianceModel model_;
  std::size_t mesh_;
  std::uint64_t seed_;
  CholeskyFactor factor_;
};

inline std::vector<SampledPath> sample_paths(const CovarianceModel& model, std::size_t mesh,
                                             std::size_t trajectories, std::uint64_t seed) {
  GaussianSampler sampler(model, mesh, seed);
  std::vector<SampledPath> out;
  out.reserve(trajectories);
  for (std::size_t t = 0; t < trajectories; ++t)
    out.push_back(sampler.sample(static_cast<std::uint32_t>(t)));
  return out;
}

// Grid 2D rho-variation of the model covariance over [s,t] x [u,v], with each
// axis discretized uniformly into `intervals` cells. Exactness of the
// partition search follows two_d_variation_indexed.
inline VariationResult grid_rho_variation(const CovarianceModel& model, double s, double t,
                                          double u, double v, double rho,
                                          std::size_t intervals = 12) {
  require(rho >= 1.0, "grid_rho_variation: rho must be >= 1");
  require(s <= t && u <= v, "grid_rho_variation: bad rectangle");
  if (s == t || u == v) return {0.0, true};
  std::vector<double> xs(intervals + 1), ys(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(intervals);
    xs[i] = s + w * (t - s);
    ys[i] = u + w * (v - u);
  }
  const GridFunction2D f = make_grid_function(std::move(xs), std::move(ys), [&](double a, double b) {
    return covariance(model, a, b);
  });
  return two_d_variation_indexed(f, 0, intervals, 0, intervals, rho);
}

inline VariationResult grid_rho_variation(const GridFunction2D& f, std::size_t i0, std::size_t i1,
                                          std::size_t j0, std::size_t j1, double rho) {
  return two_d_variation_indexed(f, i0, i1, j0, j1, rho);
}

// |D|_{R,rho} = ( max_i V_rho(R; [t_i, t_{i+1}]^2) )^rho over the cells of a
// partition D of [0,1]; each cell's variation is computed on a uniform
// refinement with `cell_intervals` subcells per axis (within the exact range
// of the partition search).
inline double mesh_covariance_modulus(const CovarianceModel& model, const std::vector<double>& partition,
                                      double rho, std::size_t cell_intervals = 12) {
  require(partition.size() >= 2, "mesh_covariance_modulus: partition needs >= 2 points");
  require(std::abs(partition.front()) <= 1e-15 && std::abs(partition.back() - 1.0) <= 1e-12,
          "mesh_covariance_modulus: partition must span [0,1]");
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
    const double a = partition[i], b = partition[i + 1];
    require(b > a, "mesh_covariance_modulus: partition not increasing");
    worst = std::max(worst, grid_rho_variation(model, a, b, a, b, rho, cell_intervals).value);
  }
  return std::pow(worst, rho);
}

// Piecewise-linear coarsening: keeps the samples of x at the points of D
// (which must be existing sample times) and drops the rest. The returned
// SampledPath, read as a piecewise-linear path, is the approximation x^D.
inline SampledPath piecewise_linear(const SampledPath& x, const std::vector<double>& partition) {
  x.check();
  require(partition.size() >= 2, "piecewise_linear: partition needs >= 2 points");
  SampledPath out;
  out.dim = x.dim;
  out.times.reserve(partition.size());
  for (double t : partition) {
    const auto it = std::lower_bound(x.times.begin(), x.times.end(), t - 1e-12);
    require(it != x.times.end() && std::abs(*it - t) <= 1e-12,
            "piecewise_linear: partition point not on the sample grid");
    const std::size_t i = static_cast<std::size_t>(it - x.times.begin());
    out.times.push_back(x.times[i]);
    for (int c = 0; c < x.dim; ++c) out.values.push_back(x.value(i, c));
  }
  out.check();
  return out;
}

// Coarsen a path sampled on a uniform k_ref-grid to the nested uniform k-grid.
inline SampledPath coarsen_uniform(const SampledPath& x, std::size_t k) {
  const std::size_t k_ref = x.num_samples() - 1;
  require(k >= 1 && k_ref % k == 0, "coarsen_uniform: meshes must be nested");
  const std::size_t stride = k_ref / k;
  SampledPath out;
  out.dim = x.dim;
  out.times.reserve(k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    out.times.push_back(x.times[j * stride]);
    for (int c = 0; c < x.dim; ++c) out.values.push_back(x.value(j * stride, c));
  }
  return out;
}

// The standard bump kernel exp(-1/(1-u^2)) on (-1,1); the normalization is
// applied discretely inside mollify, so no closed-form constant appears here.
inline double bump_kernel(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// Mollification x^eps(t) = int phi_eps(t-u) xbar(u) du with xbar the constant
// extension of x beyond [0,1]. Quadrature: nodes symmetric about t with step
// eps/20, trapezoid weights, kernel mass renormalized on the same stencil, so
// constants are reproduced exactly and linear paths are exact at interior
// points by symmetry.
inline SampledPath mollify(const SampledPath& x, double eps,
                           const std::function<double(double)>& kernel = bump_kernel) {
  x.check();
  require(eps > 0.0, "mollify: eps must be positive");
  double max_cell = 0.0;
  for (std::size_t i = 1; i < x.times.size(); ++i)
    max_cell = std::max(max_cell, x.times[i] - x.times[i - 1]);
  require(eps >= max_cell, "mollify: eps smaller than one sample cell of x");

  constexpr int kHalfNodes = 20;  // step eps/20 on [-eps, eps]
  std::vector<double> w(2 * kHalfNodes + 1);
  double mass = 0.0;
  for (int j = -kHalfNodes; j <= kHalfNodes; ++j) {
    double k = kernel(static_cast<double>(j) / kHalfNodes);
    require(k >= 0.0, "mollify: kernel must be nonnegative");
    if (std::abs(j) == kHalfNodes) k *= 0.5;
    w[static_cast<std::size_t>(j + kHalfNodes)] = k;
    mass += k;
  }
  require(mass > 0.0, "mollify: kernel mass vanished on the stencil");

  SampledPath out = x;
  const double step = eps / kHalfNodes;
  for (std::size_t i = 0; i < x.num_samples(); ++i) {
    const double t = x.times[i];
    for (int c = 0; c < x.dim; ++c) {
      double acc = 0.0;
      for (int j = -kHalfNodes; j <= kHalfNodes; ++j)
        acc += w[static_cast<std::size_t>(j + kHalfNodes)] * x.eval(t + j * step, c);
      out.value(i, c) = acc / mass;
    }
  }
  return out;
}

}  // namespace roughpath
