#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "roughpath/contract.hpp"
#include "roughpath/gaussian.hpp"
#include "roughpath/grid2d.hpp"

namespace roughpath {

namespace detail {
inline void check_shared_grid(const GridFunction2D& f, const GridFunction2D& g) {
  require(f.xs.size() == g.xs.size() && f.ys.size() == g.ys.size(),
          "young_integral_2d: integrand and integrator grids differ");
  for (std::size_t i = 0; i < f.xs.size(); ++i)
    require(std::abs(f.xs[i] - g.xs[i]) <= 1e-12, "young_integral_2d: x grids differ");
  for (std::size_t j = 0; j < f.ys.size(); ++j)
    require(std::abs(f.ys[j] - g.ys[j]) <= 1e-12, "young_integral_2d: y grids differ");
}
}  // namespace detail

// 2D Young (Riemann-Stieltjes) sum over the index rectangle:
//   sum_{i,j} f(t_i, t~_j) g(cell_ij)
// with left-point evaluation, the single quadrature convention used
// throughout this project. Converges to the 2D Young integral under grid
// refinement when f,g have finite p,q-variation with 1/p + 1/q > 1.
inline double young_integral_2d(const GridFunction2D& f, const GridFunction2D& g,
                                std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) {
  detail::check_shared_grid(f, g);
  require(i0 <= i1 && i1 <= f.xs.size() - 1 && j0 <= j1 && j1 <= f.ys.size() - 1,
          "young_integral_2d: bad index rectangle");
  double s = 0.0;
  for (std::size_t i = i0; i < i1; ++i)
    for (std::size_t j = j0; j < j1; ++j)
      s += f.at(i, j) * g.rect(i, i + 1, j, j + 1);
  return s;
}

inline double young_integral_2d(const GridFunction2D& f, const GridFunction2D& g) {
  return young_integral_2d(f, g, 0, f.xs.size() - 1, 0, f.ys.size() - 1);
}

// f(u,v) - f(s,v) - f(u,s) + f(s,s) with (s,s) the lower-left grid corner:
// forces the vanishing-on-initial-edges normalization the iterated-integral
// bounds assume.
inline GridFunction2D subtract_initial_edges(const GridFunction2D& f) {
  GridFunction2D out = f;
  for (std::size_t i = 0; i < f.xs.size(); ++i)
    for (std::size_t j = 0; j < f.ys.size(); ++j)
      out.at(i, j) = f.at(i, j) - f.at(0, j) - f.at(i, 0) + f.at(0, 0);
  return out;
}

// Iterated 2D integral int_{Delta^n x Delta^n} f dg_1 ... dg_n over the grid
// rectangle [i0,i1] x [j0,j1], n <= 3, anchored at the rectangle's lower-left
// corner. The inner value is accumulated as a grid function
// Phi^(k)(u,v) = int_{[s,u]x[s',v]} Phi^(k-1) dg_k via the rectangle
// recurrence, so the whole evaluation is O(n * grid^2).
inline double iterated_2d(const GridFunction2D& f, const std::vector<GridFunction2D>& gs,
                          std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1,
                          bool normalize_edges = false) {
  require(!gs.empty() && gs.size() <= 3, "iterated_2d: supports 1 <= n <= 3 integrators");
  for (const auto& g : gs) detail::check_shared_grid(f, g);
  require(i0 <= i1 && i1 <= f.xs.size() - 1 && j0 <= j1 && j1 <= f.ys.size() - 1,
          "iterated_2d: bad index rectangle");
  const std::size_t nx = i1 - i0 + 1;
  const std::size_t ny = j1 - j0 + 1;
  std::vector<double> phi(nx * ny), next(nx * ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      double v = f.at(i0 + i, j0 + j);
      if (normalize_edges)
        v += -f.at(i0, j0 + j) - f.at(i0 + i, j0) + f.at(i0, j0);
      phi[i * ny + j] = v;
    }
  for (const auto& g : gs) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 1; i < nx; ++i)
      for (std::size_t j = 1; j < ny; ++j)
        next[i * ny + j] = next[(i - 1) * ny + j] + next[i * ny + (j - 1)] -
                           next[(i - 1) * ny + (j - 1)] +
                           phi[(i - 1) * ny + (j - 1)] *
                               g.rect(i0 + i - 1, i0 + i, j0 + j - 1, j0 + j);
    std::swap(phi, next);
  }
  return phi[nx * ny - 1];
}

inline double iterated_2d(const GridFunction2D& f, const std::vector<GridFunction2D>& gs,
                          bool normalize_edges = false) {
  return iterated_2d(f, gs, 0, f.xs.size() - 1, 0, f.ys.size() - 1, normalize_edges);
}

// sup over all grid rectangles inside the index rectangle of |f(A)|.
inline double v_infinity(const GridFunction2D& f, std::size_t i0, std::size_t i1, std::size_t j0,
                         std::size_t j1) {
  return v_infinity_indexed(f, i0, i1, j0, j1);
}

inline double v_infinity(const GridFunction2D& f) {
  return v_infinity_indexed(f, 0, f.xs.size() - 1, 0, f.ys.size() - 1);
}

struct InterpolationCheck {
  double lhs = 0.0;   // V_gamma
  double rhs = 0.0;   // V_infty^{1 - rho/gamma} * V_rho^{rho/gamma}
  bool exact = true;  // both variations from exact partition searches
};

// 2D interpolation inequality V_gamma <= V_infty^{1-rho/gamma} V_rho^{rho/gamma}
// for gamma > rho >= 1, evaluated on the grid.
inline InterpolationCheck interpolation_check(const GridFunction2D& f, double rho, double gamma,
                                              std::size_t i0, std::size_t i1, std::size_t j0,
                                              std::size_t j1) {
  require(gamma > rho && rho >= 1.0, "interpolation_check: need gamma > rho >= 1");
  const VariationResult vg = two_d_variation_indexed(f, i0, i1, j0, j1, gamma);
  const VariationResult vr = two_d_variation_indexed(f, i0, i1, j0, j1, rho);
  const double vi = v_infinity(f, i0, i1, j0, j1);
  InterpolationCheck out;
  out.lhs = vg.value;
  out.rhs = std::pow(vi, 1.0 - rho / gamma) * std::pow(vr.value, rho / gamma);
  out.exact = vg.exact && vr.exact;
  return out;
}

struct CovarianceL2Check {
  double mc_estimate = 0.0;  // E[( int Z^1_{0,u} dZ^2_u )^2], Monte Carlo
  double mc_stderr = 0.0;
  double young_value = 0.0;  // int int R_{Z^1}(0,.;0,.) dR_{Z^2}, 2D Young sum
};

// L^2 identity for the cross iterated integral of the word (a b) over two
// independent components a != b: the left side is estimated over sampled
// piecewise-linear paths (the stochastic integral along a piecewise-linear
// path is the exact trapezoid sum), the right side is the 2D Young sum of
// the covariance against itself. Components are 1-based.
inline CovarianceL2Check covariance_l2_identity_check(const CovarianceModel& model,
                                                      std::size_t mesh, std::size_t mc_count,
                                                      std::uint64_t seed, int comp_a = 1,
                                                      int comp_b = 2) {
  require(model.dimension >= 2, "covariance_l2_identity_check: needs two independent components");
  require(comp_a >= 1 && comp_a <= model.dimension && comp_b >= 1 &&
              comp_b <= model.dimension && comp_a != comp_b,
          "covariance_l2_identity_check: component pair must be distinct and in range");
  require(mc_count >= 2, "covariance_l2_identity_check: needs at least 2 samples");
  GaussianSampler sampler(model, mesh, seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t traj = 0; traj < mc_count; ++traj) {
    const SampledPath p = sampler.sample(static_cast<std::uint32_t>(traj));
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < p.num_samples(); ++i) {
      const double z1_mid = 0.5 * (p.value(i, comp_a - 1) + p.value(i + 1, comp_a - 1));
      integral += z1_mid * (p.value(i + 1, comp_b - 1) - p.value(i, comp_b - 1));
    }
    const double sq = integral * integral;
    sum += sq;
    sum_sq += sq * sq;
  }
  CovarianceL2Check out;
  const double n = static_cast<double>(mc_count);
  out.mc_estimate = sum / n;
  const double var = std::max(0.0, sum_sq / n - out.mc_estimate * out.mc_estimate);
  out.mc_stderr = std::sqrt(var / n);

  std::vector<double> grid(mesh + 1);
  for (std::size_t i = 0; i <= mesh; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(mesh);
  const GridFunction2D r = make_grid_function(grid, grid, [&](double u, double v) {
    return covariance(model, u, v);
  });
  // R_{Z^1}(0,u;0,v) as a rectangular increment from the origin.
  GridFunction2D f = subtract_initial_edges(r);
  out.young_value = young_integral_2d(f, r);
  return out;
}

struct FubiniDiagResult {
  double iterated = 0.0;     // int_{Delta^2} f dg dg, nested simplex sums
  double half_diag = 0.0;    // (1/2) int f(u ^ v) d(g(u) g(v)), 2D left-point sum
  double naive_outer = 0.0;  // int f d( int g dg ): NOT the simplex integral
};

// The Fubini diagonal trick on a shared 1D grid, up to (and excluding)
// index t_index. The iterated side uses a left-point inner sum and a
// trapezoid outer stage, which makes the discrete identity
// iterated == half_diag exact for arbitrary grid data (up to summation
// order); both converge to the simplex integral at rate O(mesh). The naive
// outer form is reported for contrast: it converges to a different value
// (1/3 vs 1/6 for f = g = identity on [0,1]).
inline FubiniDiagResult fubini_diag(const std::vector<double>& f, const std::vector<double>& g,
                                    std::size_t t_index) {
  require(f.size() == g.size() && f.size() >= 2, "fubini_diag: grids must match, size >= 2");
  require(t_index < f.size(), "fubini_diag: t_index out of range");
  FubiniDiagResult out;

  // iterated: F_j = sum_{i<j} f_i dg_i (left point), outer trapezoid.
  double running = 0.0;
  for (std::size_t j = 0; j < t_index; ++j) {
    const double dg = g[j + 1] - g[j];
    out.iterated += (running + 0.5 * f[j] * dg) * dg;
    running += f[j] * dg;
  }

  // half-diagonal: (1/2) sum_{i,j} f(t_{min(i,j)}) dg_i dg_j.
  for (std::size_t i = 0; i < t_index; ++i) {
    const double dgi = g[i + 1] - g[i];
    for (std::size_t j = 0; j < t_index; ++j)
      out.half_diag += 0.5 * f[std::min(i, j)] * dgi * (g[j + 1] - g[j]);
  }

  // naive outer form: A = int g dg (exact for piecewise-linear g), then the
  // left-point sum of f against A.
  double a_prev = 0.0;
  for (std::size_t j = 0; j < t_index; ++j) {
    const double dg = g[j + 1] - g[j];
    const double a_next = a_prev + 0.5 * (g[j] + g[j + 1]) * dg;
    out.naive_outer += f[j] * (a_next - a_prev);
    a_prev = a_next;
  }
  return out;
}

}  // namespace roughpath
