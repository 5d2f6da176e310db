#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "roughpath/contract.hpp"

namespace roughpath {

// Real function on a grid product: values at (xs[i], ys[j]), exact lookup
// only (no interpolation).
struct GridFunction2D {
  std::vector<double> xs, ys;
  std::vector<double> v;  // row-major, v[i*ys.size() + j]

  double at(std::size_t i, std::size_t j) const { return v[i * ys.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return v[i * ys.size() + j]; }

  void check() const {
    require(xs.size() >= 1 && ys.size() >= 1, "GridFunction2D: empty axis");
    require(v.size() == xs.size() * ys.size(), "GridFunction2D: value size mismatch");
    for (std::size_t i = 1; i < xs.size(); ++i)
      require(xs[i] > xs[i - 1], "GridFunction2D: x axis not increasing");
    for (std::size_t j = 1; j < ys.size(); ++j)
      require(ys[j] > ys[j - 1], "GridFunction2D: y axis not increasing");
  }

  // Rectangular increment f(t,v) - f(t,u) - f(s,v) + f(s,u) by corner indices.
  double rect(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const {
    return at(i1, j1) - at(i1, j0) - at(i0, j1) + at(i0, j0);
  }
};

template <typename F>
inline GridFunction2D make_grid_function(std::vector<double> xs, std::vector<double> ys, F&& f) {
  GridFunction2D g;
  g.xs = std::move(xs);
  g.ys = std::move(ys);
  g.v.resize(g.xs.size() * g.ys.size());
  for (std::size_t i = 0; i < g.xs.size(); ++i)
    for (std::size_t j = 0; j < g.ys.size(); ++j) g.at(i, j) = f(g.xs[i], g.ys[j]);
  return g;
}

// sup over all grid rectangles inside [i0,i1]x[j0,j1] of |f(rect)|.
inline double v_infinity_indexed(const GridFunction2D& f, std::size_t i0, std::size_t i1,
                                 std::size_t j0, std::size_t j1) {
  require(i0 <= i1 && i1 <= f.xs.size() - 1 && j0 <= j1 && j1 <= f.ys.size() - 1,
          "v_infinity: index rectangle out of range");
  double m = 0.0;
  for (std::size_t a = i0; a < i1; ++a)
    for (std::size_t b = a + 1; b <= i1; ++b)
      for (std::size_t c = j0; c < j1; ++c)
        for (std::size_t d = c + 1; d <= j1; ++d) m = std::max(m, std::abs(f.rect(a, b, c, d)));
  return m;
}

struct VariationResult {
  double value = 0.0;
  bool exact = true;  // false when the partition search fell back to the heuristic
};

namespace detail {

// sum over row blocks of |f(block x [c0,c1])|^rho for a fixed row partition.
inline double column_cost(const GridFunction2D& f, const std::vector<std::size_t>& rows,
                          double rho, std::size_t c0, std::size_t c1) {
  double s = 0.0;
  for (std::size_t r = 0; r + 1 < rows.size(); ++r)
    s += std::pow(std::abs(f.rect(rows[r], rows[r + 1], c0, c1)), rho);
  return s;
}

// Exact best sub-partition of the column axis for a fixed row partition:
// the objective is additive over chosen column intervals, so a quadratic
// dynamic program over interval endpoints finds the supremum.
inline double best_columns_given_rows(const GridFunction2D& f, const std::vector<std::size_t>& rows,
                                      double rho, std::size_t j0, std::size_t j1,
                                      std::vector<std::size_t>* arg_cols = nullptr) {
  const std::size_t m = j1 - j0;
  std::vector<double> best(m + 1, 0.0);
  std::vector<std::size_t> prev(m + 1, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    double b = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + column_cost(f, rows, rho, j0 + i, j0 + j);
      if (cand > b) { b = cand; arg = i; }
    }
    best[j] = b;
    prev[j] = arg;
  }
  if (arg_cols) {
    arg_cols->clear();
    std::size_t j = m;
    while (true) {
      arg_cols->push_back(j0 + j);
      if (j == 0) break;
      j = prev[j];
    }
    std::reverse(arg_cols->begin(), arg_cols->end());
  }
  return best[m];
}

inline double row_cost_transposed(const GridFunction2D& f, const std::vector<std::size_t>& cols,
                                  double rho, std::size_t r0, std::size_t r1) {
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < cols.size(); ++c)
    s += std::pow(std::abs(f.rect(r0, r1, cols[c], cols[c + 1])), rho);
  return s;
}

inline double best_rows_given_columns(const GridFunction2D& f, const std::vector<std::size_t>& cols,
                                      double rho, std::size_t i0, std::size_t i1,
                                      std::vector<std::size_t>* arg_rows) {
  const std::size_t n = i1 - i0;
  std::vector<double> best(n + 1, 0.0);
  std::vector<std::size_t> prev(n + 1, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    double b = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + row_cost_transposed(f, cols, rho, i0 + i, i0 + j);
      if (cand > b) { b = cand; arg = i; }
    }
    best[j] = b;
    prev[j] = arg;
  }
  if (arg_rows) {
    arg_rows->clear();
    std::size_t j = n;
    while (true) {
      arg_rows->push_back(i0 + j);
      if (j == 0) break;
      j = prev[j];
    }
    std::reverse(arg_rows->begin(), arg_rows->end());
  }
  return best[n];
}

inline std::vector<std::size_t> full_range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> r;
  for (std::size_t i = a; i <= b; ++i) r.push_back(i);
  return r;
}

}  // namespace detail

// Grid 2D rho-variation over the index rectangle [i0,i1]x[j0,j1]:
//   sup_{D,Dt} ( sum |f(block)|^rho )^{1/rho}
// with the supremum over sub-partitions D, Dt of the grid axes.
//
// Search strategy:
//   * rho = 1: the finest grid partition is optimal (triangle inequality),
//     evaluated directly at any size.
//   * one axis has <= kEnumLimitIntervals intervals: that axis is enumerated
//     exhaustively and the other solved by dynamic programming, which is
//     exact.
//   * otherwise: alternating per-axis dynamic programming from finest and
//     coarsest starting partitions; a certified lower bound, flagged
//     exact=false.
inline VariationResult two_d_variation_indexed(const GridFunction2D& f, std::size_t i0,
                                               std::size_t i1, std::size_t j0, std::size_t j1,
                                               double rho) {
  require(rho >= 1.0, "two_d_variation: rho must be >= 1");
  require(i1 <= f.xs.size() - 1 && j1 <= f.ys.size() - 1 && i0 <= i1 && j0 <= j1,
          "two_d_variation: index rectangle out of range");
  VariationResult res;
  if (i0 == i1 || j0 == j1) return res;  // degenerate rectangle

  if (rho == 1.0) {
    double s = 0.0;
    for (std::size_t i = i0; i < i1; ++i)
      for (std::size_t j = j0; j < j1; ++j) s += std::abs(f.rect(i, i + 1, j, j + 1));
    res.value = s;
    return res;
  }

  constexpr std::size_t kEnumLimitIntervals = 13;  // 2^12 = 4096 partitions
  const std::size_t nrows = i1 - i0;
  const std::size_t ncols = j1 - j0;
  const bool enumerate_rows = nrows <= ncols;
  const std::size_t enum_n = enumerate_rows ? nrows : ncols;

  double best_mass = 0.0;
  if (enum_n <= kEnumLimitIntervals) {
    const std::size_t interior = enum_n - 1;
    const std::uint64_t combos = 1ull << interior;
    std::vector<std::size_t> part;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
      part.clear();
      part.push_back(enumerate_rows ? i0 : j0);
      for (std::size_t b = 0; b < interior; ++b)
        if (mask & (1ull << b)) part.push_back((enumerate_rows ? i0 : j0) + b + 1);
      part.push_back(enumerate_rows ? i1 : j1);
      const double mass = enumerate_rows
                              ? detail::best_columns_given_rows(f, part, rho, j0, j1)
                              : detail::best_rows_given_columns(f, part, rho, i0, i1, nullptr);
      best_mass = std::max(best_mass, mass);
    }
    res.exact = true;
  } else {
    res.exact = false;
    for (int start = 0; start < 2; ++start) {
      std::vector<std::size_t> rows = (start == 0) ? detail::full_range(i0, i1)
                                                   : std::vector<std::size_t>{i0, i1};
      double mass = -1.0;
      for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::size_t> cols;
        const double m1 = detail::best_columns_given_rows(f, rows, rho, j0, j1, &cols);
        const double m2 = detail::best_rows_given_columns(f, cols, rho, i0, i1, &rows);
        if (m2 <= mass * (1.0 + 1e-14) && iter > 0) { mass = std::max(mass, m2); break; }
        mass = std::max({mass, m1, m2});
      }
      best_mass = std::max(best_mass, mass);
    }
  }
  res.value = std::pow(best_mass, 1.0 / rho);
  return res;
}

// Lower bound on the controlled rho-variation |f|_{rho-var;R}^rho, where the
// supremum runs over arbitrary rectangle partitions rather than grid-like
// ones: dynamic programming over guillotine partitions (recursive straight
// cuts along grid lines). Guillotine partitions include every grid-like
// partition, so the value dominates the grid V_rho^rho; and any straight cut
// is itself a guillotine split, so the value is superadditive across
// splitting lines by construction. Grid V_rho^rho itself is not
// superadditive (the fBM covariance gives strict counterexamples).
inline double controlled_variation_guillotine(const GridFunction2D& f, std::size_t i0,
                                              std::size_t i1, std::size_t j0, std::size_t j1,
                                              double rho) {
  require(rho >= 1.0, "controlled_variation_guillotine: rho must be >= 1");
  require(i0 <= i1 && i1 < f.xs.size() && j0 <= j1 && j1 < f.ys.size(),
          "controlled_variation_guillotine: index rectangle out of range");
  const std::size_t nx = i1 - i0, ny = j1 - j0;
  if (nx == 0 || ny == 0) return 0.0;
  require(nx <= 24 && ny <= 24, "controlled_variation_guillotine: grid too large");
  // best[a][b][c][d]: optimum over the rectangle [i0+a, i0+b] x [j0+c, j0+d]
  const auto idx = [nx, ny](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return ((a * (nx + 1) + b) * (ny + 1) + c) * (ny + 1) + d;
  };
  std::vector<double> best((nx + 1) * (nx + 1) * (ny + 1) * (ny + 1), 0.0);
  for (std::size_t w = 1; w <= nx; ++w)
    for (std::size_t h = 1; h <= ny; ++h)
      for (std::size_t a = 0; a + w <= nx; ++a)
        for (std::size_t c = 0; c + h <= ny; ++c) {
          const std::size_t b = a + w, d = c + h;
          double v = std::pow(std::abs(f.rect(i0 + a, i0 + b, j0 + c, j0 + d)), rho);
          for (std::size_t cut = a + 1; cut < b; ++cut)
            v = std::max(v, best[idx(a, cut, c, d)] + best[idx(cut, b, c, d)]);
          for (std::size_t cut = c + 1; cut < d; ++cut)
            v = std::max(v, best[idx(a, b, c, cut)] + best[idx(a, b, cut, d)]);
          best[idx(a, b, c, d)] = v;
        }
  return best[idx(0, nx, 0, ny)];
}

// Same supremum computed by brute force over every pair of axis
// sub-partitions. Exponential; meant as the test oracle for small grids.
inline double two_d_variation_bruteforce(const GridFunction2D& f, std::size_t i0, std::size_t i1,
                                         std::size_t j0, std::size_t j1, double rho) {
  const std::size_t nr = i1 - i0, nc = j1 - j0;
  if (nr == 0 || nc == 0) return 0.0;
  require(nr <= 16 && nc <= 16, "two_d_variation_bruteforce: grid too large");
  double best = 0.0;
  const std::uint64_t rcombos = 1ull << (nr - 1);
  const std::uint64_t ccombos = 1ull << (nc - 1);
  for (std::uint64_t rm = 0; rm < rcombos; ++rm) {
    std::vector<std::size_t> rows{i0};
    for (std::size_t b = 0; b + 1 < nr; ++b)
      if (rm & (1ull << b)) rows.push_back(i0 + b + 1);
    rows.push_back(i1);
    for (std::uint64_t cm = 0; cm < ccombos; ++cm) {
      std::vector<std::size_t> cols{j0};
      for (std::size_t b = 0; b + 1 < nc; ++b)
        if (cm & (1ull << b)) cols.push_back(j0 + b + 1);
      cols.push_back(j1);
      double s = 0.0;
      for (std::size_t r = 0; r + 1 < rows.size(); ++r)
        for (std::size_t c = 0; c + 1 < cols.size(); ++c)
          s += std::pow(std::abs(f.rect(rows[r], rows[r + 1], cols[c], cols[c + 1])), rho);
      best = std::max(best, s);
    }
  }
  return std::pow(best, 1.0 / rho);
}

// ---------------------------------------------------------------------------
// n-dimensional grid functions, n <= 4.
// ---------------------------------------------------------------------------

struct GridFunctionND {
  std::vector<std::vector<double>> axes;  // n increasing grids
  std::vector<double> v;                  // dense, row-major over axes order

  int arity() const { return static_cast<int>(axes.size()); }

  void check() const {
    require(!axes.empty() && axes.size() <= 4, "GridFunctionND: arity must be 1..4");
    std::size_t total = 1;
    for (const auto& ax : axes) {
      require(ax.size() >= 1, "GridFunctionND: empty axis");
      if (axes.size() >= 3)
        require(ax.size() <= 257, "GridFunctionND: axes capped at 256 intervals for arity >= 3");
      for (std::size_t i = 1; i < ax.size(); ++i)
        require(ax[i] > ax[i - 1], "GridFunctionND: axis not increasing");
      total *= ax.size();
    }
    require(v.size() == total, "GridFunctionND: value size mismatch");
  }

  std::size_t flat(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < axes.size(); ++a) f = f * axes[a].size() + idx[a];
    return f;
  }

  double at(const std::vector<std::size_t>& idx) const { return v[flat(idx)]; }
  double& at(const std::vector<std::size_t>& idx) { return v[flat(idx)]; }
};

// Alternating 2^n-corner sum: the recursive rectangular increment in each
// coordinate. Boxes are given by per-axis index pairs (lo, hi).
inline double rect_increment_nd(const GridFunctionND& f,
                                const std::vector<std::pair<std::size_t, std::size_t>>& box) {
  require(static_cast<int>(box.size()) == f.arity(), "rect_increment_nd: box arity mismatch");
  for (std::size_t a = 0; a < box.size(); ++a)
    require(box[a].first <= box[a].second && box[a].second < f.axes[a].size(),
            "rect_increment_nd: box corner off the grid");
  const int n = f.arity();
  double total = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int ones = 0;
    for (int a = 0; a < n; ++a) {
      const bool hi = mask & (1u << a);
      idx[static_cast<std::size_t>(a)] = hi ? box[static_cast<std::size_t>(a)].second
                                            : box[static_cast<std::size_t>(a)].first;
      if (!hi) ++ones;
    }
    total += ((ones % 2 == 0) ? 1.0 : -1.0) * f.at(idx);
  }
  return total;
}

template <typename F>
inline GridFunctionND make_grid_function_nd(std::vector<std::vector<double>> axes, F&& f) {
  GridFunctionND g;
  g.axes = std::move(axes);
  require(!g.axes.empty() && g.axes.size() <= 4, "GridFunctionND: arity must be 1..4");
  std::size_t total = 1;
  for (const auto& ax : g.axes) {
    if (g.axes.size() >= 3)
      require(ax.size() <= 257, "GridFunctionND: axes capped at 256 intervals for arity >= 3");
    total *= ax.size();
  }
  g.v.resize(total);
  std::vector<std::size_t> idx(g.axes.size(), 0);
  std::vector<double> point(g.axes.size());
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = g.axes.size(); a-- > 0;) {
      idx[a] = rem % g.axes[a].size();
      rem /= g.axes[a].size();
    }
    for (std::size_t a = 0; a < g.axes.size(); ++a) point[a] = g.axes[a][idx[a]];
    g.v[flat] = f(point);
  }
  g.check();
  return g;
}

}  // namespace roughpath
