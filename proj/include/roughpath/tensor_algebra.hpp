#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "roughpath/contract.hpp"

namespace roughpath {

// Element of the truncated tensor algebra of level N over R^d, stored as one
// dense array per level (level n holds d^n entries, level 0 a single scalar).
// Entries at level n are indexed by words (i_1,...,i_n), i_j in 1..d, flat
// index sum_j (i_j - 1) * d^(n-j): the first letter is the most significant
// digit, so the entry for word w is the iterated integral dx^{i_1}...dx^{i_n}
// for path lifts.
//
// TensorElement is an immutable value after construction; all operations
// below are pure functions and safe to share across threads.
class TensorElement {
 public:
  TensorElement(int dim, int level) : dim_(dim), level_(level) {
    require(dim >= 1, "TensorElement: dimension must be >= 1");
    require(level >= 1, "TensorElement: truncation level must be >= 1");
    double total = 1.0;
    levels_.resize(static_cast<std::size_t>(level) + 1);
    std::size_t size = 1;
    for (int n = 0; n <= level; ++n) {
      total *= (n == 0) ? 1.0 : static_cast<double>(dim);
      require(total <= 1e7, "TensorElement: d^N exceeds the 1e7 entry cap");
      levels_[static_cast<std::size_t>(n)].assign(size, 0.0);
      size *= static_cast<std::size_t>(dim);
    }
  }

  int dim() const { return dim_; }
  int level() const { return level_; }

  const std::vector<double>& at_level(int n) const { return levels_[static_cast<std::size_t>(n)]; }
  std::vector<double>& at_level(int n) { return levels_[static_cast<std::size_t>(n)]; }

  double scalar() const { return levels_[0][0]; }

  bool finite() const {
    for (const auto& lvl : levels_)
      for (double v : lvl)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int dim_, level_;
  std::vector<std::vector<double>> levels_;
};

inline TensorElement tensor_unit(int dim, int level) {
  TensorElement t(dim, level);
  t.at_level(0)[0] = 1.0;
  return t;
}

inline std::size_t word_to_index(const std::vector<int>& word, int dim) {
  std::size_t idx = 0;
  for (int letter : word) {
    require(letter >= 1 && letter <= dim, "word letter out of range 1..d");
    idx = idx * static_cast<std::size_t>(dim) + static_cast<std::size_t>(letter - 1);
  }
  return idx;
}

inline std::vector<int> index_to_word(std::size_t idx, int dim, int length) {
  std::vector<int> w(static_cast<std::size_t>(length));
  for (int j = length - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = static_cast<int>(idx % static_cast<std::size_t>(dim)) + 1;
    idx /= static_cast<std::size_t>(dim);
  }
  return w;
}

namespace detail {
inline void check_same_shape(const TensorElement& g, const TensorElement& h) {
  require(g.dim() == h.dim() && g.level() == h.level(),
          "tensor operands must share dimension and truncation level");
}
}  // namespace detail

// Truncated tensor (Chen) product: pi_n(g (x) h) = sum_i pi_{n-i}(g) (x) pi_i(h).
inline TensorElement tensor_mul(const TensorElement& g, const TensorElement& h) {
  detail::check_same_shape(g, h);
  const int d = g.dim();
  const int N = g.level();
  TensorElement out(d, N);
  for (int n = 0; n <= N; ++n) {
    auto& dst = out.at_level(n);
    for (int i = 0; i <= n; ++i) {
      const auto& a = g.at_level(n - i);
      const auto& b = h.at_level(i);
      std::size_t idx = 0;
      for (double av : a)
        for (double bv : b) dst[idx++] += av * bv;
    }
  }
  return out;
}

inline TensorElement tensor_add(const TensorElement& g, const TensorElement& h) {
  detail::check_same_shape(g, h);
  TensorElement out = g;
  for (int n = 0; n <= g.level(); ++n) {
    auto& dst = out.at_level(n);
    const auto& b = h.at_level(n);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += b[i];
  }
  return out;
}

inline TensorElement tensor_scale(const TensorElement& g, double c) {
  TensorElement out = g;
  for (int n = 0; n <= g.level(); ++n)
    for (double& v : out.at_level(n)) v *= c;
  return out;
}

// Dilation delta_lambda: multiplies level n by lambda^n. A group homomorphism
// for the tensor product.
inline TensorElement tensor_dilate(const TensorElement& g, double lambda) {
  TensorElement out = g;
  double f = 1.0;
  for (int n = 1; n <= g.level(); ++n) {
    f *= lambda;
    for (double& v : out.at_level(n)) v *= f;
  }
  return out;
}

// exp of a level-1 vector: pi_n = v^{(x)n} / n!.
inline TensorElement tensor_exp(const std::vector<double>& v, int level) {
  const int d = static_cast<int>(v.size());
  TensorElement out = tensor_unit(d, level);
  if (level >= 1) out.at_level(1) = v;
  for (int n = 2; n <= level; ++n) {
    const auto& prev = out.at_level(n - 1);
    auto& cur = out.at_level(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    std::size_t idx = 0;
    for (double pv : prev)
      for (double vv : v) cur[idx++] = pv * vv * inv_n;
  }
  return out;
}

// Group inverse in T^N: for g = s(1 + x) with x supported on levels >= 1,
// g^{-1} = (1/s) sum_k (-x)^{(x)k}; the series terminates at level N.
inline TensorElement tensor_inverse(const TensorElement& g) {
  require(g.scalar() != 0.0, "tensor_inverse: level-0 scalar is zero (singular)");
  const int d = g.dim();
  const int N = g.level();
  const double s = g.scalar();
  TensorElement x = tensor_scale(g, 1.0 / s);
  x.at_level(0)[0] = 0.0;  // x = g/s - 1
  TensorElement out = tensor_unit(d, N);
  TensorElement power = tensor_unit(d, N);
  double sign = 1.0;
  for (int k = 1; k <= N; ++k) {
    power = tensor_mul(power, x);
    sign = -sign;
    out = tensor_add(out, tensor_scale(power, sign));
  }
  return tensor_scale(out, 1.0 / s);
}

// log of a group-like element (level-0 scalar must be 1): log(1+x) series,
// truncated exactly at level N since x is supported on levels >= 1.
inline TensorElement tensor_log(const TensorElement& g) {
  require(std::abs(g.scalar() - 1.0) <= 1e-12, "tensor_log: level-0 scalar must be 1");
  const int d = g.dim();
  const int N = g.level();
  TensorElement x = g;
  x.at_level(0)[0] = 0.0;
  TensorElement out(d, N);
  TensorElement power = tensor_unit(d, N);
  double sign = -1.0;
  for (int k = 1; k <= N; ++k) {
    power = tensor_mul(power, x);
    sign = -sign;
    out = tensor_add(out, tensor_scale(power, sign / static_cast<double>(k)));
  }
  return out;
}

inline double level_euclidean_norm(const TensorElement& g, int n) {
  double s = 0.0;
  for (double v : g.at_level(n)) s += v * v;
  return std::sqrt(s);
}

inline double max_abs_entry(const TensorElement& g) {
  double m = 0.0;
  for (int n = 0; n <= g.level(); ++n)
    for (double v : g.at_level(n)) m = std::max(m, std::abs(v));
  return m;
}

// Homogeneous norm max_n (n! |pi_n|_2)^{1/n}, equivalent to the
// Carnot-Caratheodory norm on group-like elements and zero iff g is the unit.
inline double homogeneous_norm(const TensorElement& g) {
  double best = 0.0;
  double factorial = 1.0;
  for (int n = 1; n <= g.level(); ++n) {
    factorial *= static_cast<double>(n);
    const double ln = level_euclidean_norm(g, n);
    if (ln > 0.0)
      best = std::max(best, std::pow(factorial * ln, 1.0 / static_cast<double>(n)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Grid rho_{p-var} distance between two level-indexed functionals given by
// their increments over consecutive cells of a common grid. The supremum over
// sub-partitions is restricted to sub-partitions of that grid; increments
// over merged cells come from Chen multiplication, so the estimator is exact
// for paths that are linear on each grid cell (and a lower bound in general).
// ---------------------------------------------------------------------------

namespace detail {

// cumulative[i] = product of increments 0..i-1 (cumulative[0] = unit).
inline std::vector<TensorElement> cumulative_products(const std::vector<TensorElement>& incs) {
  std::vector<TensorElement> cum;
  cum.reserve(incs.size() + 1);
  cum.push_back(tensor_unit(incs.front().dim(), incs.front().level()));
  for (const auto& inc : incs) cum.push_back(tensor_mul(cum.back(), inc));
  return cum;
}

}  // namespace detail

// max_n sup_D ( sum_i |x^n - y^n|^{p/n} )^{n/p} over sub-partitions D of the
// input grid. The per-level supremum is exact: the objective is additive over
// chosen intervals, so a quadratic-time dynamic program over endpoints finds it.
inline double rho_pvar_distance(const std::vector<TensorElement>& x_increments,
                                const std::vector<TensorElement>& y_increments,
                                double p) {
  require(p >= 1.0, "rho_pvar_distance: p must be >= 1");
  require(!x_increments.empty() && x_increments.size() == y_increments.size(),
          "rho_pvar_distance: increment sequences must be non-empty and equal length");
  for (std::size_t i = 0; i < x_increments.size(); ++i) {
    detail::check_same_shape(x_increments[i], x_increments[0]);
    detail::check_same_shape(y_increments[i], x_increments[0]);
  }
  const int N = x_increments[0].level();
  const std::size_t K = x_increments.size();

  const auto cx = detail::cumulative_products(x_increments);
  const auto cy = detail::cumulative_products(y_increments);
  std::vector<TensorElement> inv_cx, inv_cy;
  inv_cx.reserve(K + 1);
  inv_cy.reserve(K + 1);
  for (std::size_t i = 0; i <= K; ++i) {
    inv_cx.push_back(tensor_inverse(cx[i]));
    inv_cy.push_back(tensor_inverse(cy[i]));
  }

  // per-level Euclidean norms of pi_n(X_{ij} - Y_{ij}), every merged cell
  // built once from the cumulative products: X_{ij} = X_{0i}^{-1} X_{0j}
  std::vector<std::vector<double>> norms(static_cast<std::size_t>(N),
                                         std::vector<double>((K + 1) * (K + 1), 0.0));
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j <= K; ++j) {
      const TensorElement xi = tensor_mul(inv_cx[i], cx[j]);
      const TensorElement yi = tensor_mul(inv_cy[i], cy[j]);
      for (int n = 1; n <= N; ++n) {
        double s = 0.0;
        const auto& a = xi.at_level(n);
        const auto& b = yi.at_level(n);
        for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        norms[static_cast<std::size_t>(n - 1)][i * (K + 1) + j] = std::sqrt(s);
      }
    }

  double result = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double q = p / static_cast<double>(n);
    const auto& level_norms = norms[static_cast<std::size_t>(n - 1)];
    std::vector<double> best(K + 1, 0.0);
    for (std::size_t j = 1; j <= K; ++j) {
      double b = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < j; ++i)
        b = std::max(b, best[i] + std::pow(level_norms[i * (K + 1) + j], q));
      best[j] = b;
    }
    result = std::max(result, std::pow(best[K], static_cast<double>(n) / p));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Flat CSV serialization, level-major, lexicographic multi-index order.
// Header names each entry L<level>_<letters>, e.g. L2_12; level 0 is "L0".
// ---------------------------------------------------------------------------

inline std::string tensor_csv_header(int dim, int level) {
  std::string h = "L0";
  std::size_t size = 1;
  for (int n = 1; n <= level; ++n) {
    size *= static_cast<std::size_t>(dim);
    for (std::size_t idx = 0; idx < size; ++idx) {
      h += ",L" + std::to_string(n) + "_";
      for (int letter : index_to_word(idx, dim, n)) h += std::to_string(letter);
    }
  }
  return h;
}

inline void write_tensor_csv(std::ostream& os, const TensorElement& g) {
  os << tensor_csv_header(g.dim(), g.level()) << "\n";
  os.precision(17);
  bool first = true;
  for (int n = 0; n <= g.level(); ++n) {
    for (double v : g.at_level(n)) {
      if (!first) os << ",";
      os << v;
      first = false;
    }
  }
  os << "\n";
}

}  // namespace roughpath
