#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "roughpath/contract.hpp"
#include "roughpath/path.hpp"
#include "roughpath/signatures.hpp"
#include "roughpath/tensor_algebra.hpp"

namespace roughpath {

// d driving vector fields V_i on R^e together with their partial derivative
// tensors up to max_order. The order-m tensor of field i is stored densely as
// out[comp * e^m + flat(k_1..k_m)] with flat = sum (k_j - 1) e^{m-j}; mixed
// partials commute, so the layout is symmetric in the k's. Derivatives come
// either from closed forms (presets) or from nested central differences.
// Instances are immutable after construction and safe to share across threads.
struct VectorFieldSet {
  int state_dim = 0;
  int driver_dim = 0;
  int max_order = 0;
  std::function<void(int i, const std::vector<double>& y, std::vector<double>& out)> value;
  std::function<void(int i, int order, const std::vector<double>& y, std::vector<double>& out)>
      derivative;  // order >= 1

  void check_field_index(int i) const {
    require(i >= 1 && i <= driver_dim, "VectorFieldSet: field index out of range");
  }
};

namespace detail {

inline std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Derivative tensors (orders 0..max_r) of field i at y; index 0 is the value.
inline std::vector<std::vector<double>> field_tower(const VectorFieldSet& V, int i, int max_r,
                                                    const std::vector<double>& y) {
  V.check_field_index(i);
  require(max_r <= V.max_order, "VectorFieldSet: insufficient derivative order for this scheme");
  std::vector<std::vector<double>> tower(static_cast<std::size_t>(max_r) + 1);
  V.value(i, y, tower[0]);
  for (int r = 1; r <= max_r; ++r) V.derivative(i, r, y, tower[static_cast<std::size_t>(r)]);
  return tower;
}

// Derivative tensors (orders 0..max_r) of the composed field
//   G = (V_{w_pos} . grad) (V_{w_{pos+1}} . grad) ... V_{w_last}
// via the Leibniz rule: each order-r tensor of G needs the tower of the inner
// composition up to order r+1, so the recursion peels one letter per level.
inline std::vector<std::vector<double>> composed_tower(const VectorFieldSet& V,
                                                       const std::vector<int>& word,
                                                       std::size_t pos, int max_r,
                                                       const std::vector<double>& y) {
  if (pos + 1 == word.size()) return field_tower(V, word[pos], max_r, y);
  const auto inner = composed_tower(V, word, pos + 1, max_r + 1, y);
  const auto outer = field_tower(V, word[pos], max_r, y);
  const std::size_t e = static_cast<std::size_t>(V.state_dim);

  std::vector<std::vector<double>> tower(static_cast<std::size_t>(max_r) + 1);
  std::vector<std::size_t> tuple;
  for (int r = 0; r <= max_r; ++r) {
    const std::size_t tuples = int_pow(e, r);
    auto& out = tower[static_cast<std::size_t>(r)];
    out.assign(e * tuples, 0.0);
    tuple.assign(static_cast<std::size_t>(r), 0);
    for (std::size_t t = 0; t < tuples; ++t) {
      // decode tuple of derivative directions (0-based)
      std::size_t rem = t;
      for (std::size_t a = static_cast<std::size_t>(r); a-- > 0;) {
        tuple[a] = rem % e;
        rem /= e;
      }
      for (std::size_t mask = 0; mask < (1ull << r); ++mask) {
        // subset S of derivative slots hits V_{w_pos}, the rest (plus the
        // contraction index) hits the inner composition
        std::size_t s_flat = 0, c_flat = 0;
        int s_count = 0, c_count = 0;
        for (int a = 0; a < r; ++a) {
          if (mask & (1ull << a)) {
            s_flat = s_flat * e + tuple[static_cast<std::size_t>(a)];
            ++s_count;
          } else {
            c_flat = c_flat * e + tuple[static_cast<std::size_t>(a)];
            ++c_count;
          }
        }
        const auto& vten = outer[static_cast<std::size_t>(s_count)];
        const auto& gten = inner[static_cast<std::size_t>(c_count) + 1];
        const std::size_t g_tuples = int_pow(e, c_count + 1);
        for (std::size_t comp = 0; comp < e; ++comp) {
          double acc = 0.0;
          for (std::size_t k = 0; k < e; ++k) {
            // V^k with derivatives S, times d_k d^{S^c} G
            acc += vten[k * int_pow(e, s_count) + s_flat] *
                   gten[comp * g_tuples + k * int_pow(e, c_count) + c_flat];
          }
          out[comp * tuples + t] += acc;
        }
      }
    }
  }
  return tower;
}

inline double pairwise_sum(std::vector<double>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return terms[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

}  // namespace detail

// (V_{i_1} . grad) ... (V_{i_{n-1}} . grad) V_{i_n} evaluated at y: the
// coefficient of the iterated integral x^{i_1,...,i_n} in the step-N Euler
// scheme. Requires derivatives up to order n-1.
inline std::vector<double> directional_euler_coefficient(const VectorFieldSet& V,
                                                         const std::vector<int>& word,
                                                         const std::vector<double>& y) {
  require(!word.empty(), "directional_euler_coefficient: empty word");
  return detail::composed_tower(V, word, 0, 0, y)[0];
}

// One step of the step-N Euler scheme: y + sum_{n<=N} sum_{|w|=n} G_w(y) x^w
// with x^w the signature entries of the driver over the step. Terms are
// accumulated per multi-index in lexicographic order and reduced pairwise so
// results do not depend on any threading of the caller.
inline std::vector<double> step_euler_n(const std::vector<double>& y, const TensorElement& sig,
                                        const VectorFieldSet& V, int level) {
  require(level >= 1, "step_euler_n: level must be >= 1");
  require(sig.level() >= level, "step_euler_n: signature truncation below scheme level");
  require(sig.dim() == V.driver_dim, "step_euler_n: driver dimension mismatch");
  require(V.max_order >= level - 1, "step_euler_n: insufficient derivative order");
  require(static_cast<int>(y.size()) == V.state_dim, "step_euler_n: state dimension mismatch");
  const std::size_t e = y.size();
  std::vector<std::vector<double>> contributions(e);
  for (int n = 1; n <= level; ++n) {
    const auto& lvl = sig.at_level(n);
    for (std::size_t idx = 0; idx < lvl.size(); ++idx) {
      const double weight = lvl[idx];
      const std::vector<int> word = index_to_word(idx, V.driver_dim, n);
      const std::vector<double> coeff = directional_euler_coefficient(V, word, y);
      for (std::size_t c = 0; c < e; ++c) contributions[c].push_back(coeff[c] * weight);
    }
  }
  std::vector<double> out = y;
  for (std::size_t c = 0; c < e; ++c)
    out[c] += detail::pairwise_sum(contributions[c], 0, contributions[c].size());
  return out;
}

// One step of the simplified step-N Euler scheme: the signature entries are
// replaced by (1/n!) x^{i_1} ... x^{i_n}; only the level-1 increment of the
// driver is needed.
inline std::vector<double> step_simplified_euler_n(const std::vector<double>& y,
                                                   const std::vector<double>& increment,
                                                   const VectorFieldSet& V, int level) {
  require(level >= 1, "step_simplified_euler_n: level must be >= 1");
  require(static_cast<int>(increment.size()) == V.driver_dim,
          "step_simplified_euler_n: increment dimension mismatch");
  require(V.max_order >= level - 1, "step_simplified_euler_n: insufficient derivative order");
  require(static_cast<int>(y.size()) == V.state_dim,
          "step_simplified_euler_n: state dimension mismatch");
  const std::size_t e = y.size();
  const std::size_t d = static_cast<std::size_t>(V.driver_dim);
  std::vector<std::vector<double>> contributions(e);
  double factorial = 1.0;
  for (int n = 1; n <= level; ++n) {
    factorial *= static_cast<double>(n);
    const std::size_t words = detail::int_pow(d, n);
    for (std::size_t idx = 0; idx < words; ++idx) {
      const std::vector<int> word = index_to_word(idx, V.driver_dim, n);
      double weight = 1.0 / factorial;
      for (int letter : word) weight *= increment[static_cast<std::size_t>(letter - 1)];
      const std::vector<double> coeff = directional_euler_coefficient(V, word, y);
      for (std::size_t c = 0; c < e; ++c) contributions[c].push_back(coeff[c] * weight);
    }
  }
  std::vector<double> out = y;
  for (std::size_t c = 0; c < e; ++c)
    out[c] += detail::pairwise_sum(contributions[c], 0, contributions[c].size());
  return out;
}

// Wong-Zakai solve: integrates dy = V(y) dx along the piecewise-linear driver
// with the classical 4th-order one-step method, `substeps` sub-intervals per
// driver segment, continuous concatenation. Throws when the state norm
// exceeds 1e12, naming the segment.
inline SampledPath wong_zakai_solve(const SampledPath& driver, const VectorFieldSet& V,
                                    const std::vector<double>& y0, int substeps) {
  driver.check();
  require(substeps >= 1, "wong_zakai_solve: substeps must be >= 1");
  require(driver.dim == V.driver_dim, "wong_zakai_solve: driver dimension mismatch");
  require(static_cast<int>(y0.size()) == V.state_dim, "wong_zakai_solve: state dimension mismatch");
  const std::size_t e = y0.size();

  SampledPath out;
  out.dim = static_cast<int>(e);
  out.times = driver.times;
  out.values.resize(out.times.size() * e);

  std::vector<double> y = y0;
  for (std::size_t c = 0; c < e; ++c) out.values[c] = y[c];

  std::vector<double> inc(static_cast<std::size_t>(driver.dim));
  std::vector<double> vfield(e);
  std::vector<double> k1(e), k2(e), k3(e), k4(e), tmp(e);
  // f(y) = sum_i V_i(y) * dx_i over the segment, constant in scaled time.
  auto rhs = [&](const std::vector<double>& state, std::vector<double>& slope) {
    std::fill(slope.begin(), slope.end(), 0.0);
    for (int i = 1; i <= V.driver_dim; ++i) {
      V.value(i, state, vfield);
      const double w = inc[static_cast<std::size_t>(i - 1)];
      for (std::size_t c = 0; c < e; ++c) slope[c] += vfield[c] * w;
    }
  };

  for (std::size_t seg = 0; seg + 1 < driver.num_samples(); ++seg) {
    for (int c = 0; c < driver.dim; ++c)
      inc[static_cast<std::size_t>(c)] = driver.value(seg + 1, c) - driver.value(seg, c);
    const double h = 1.0 / static_cast<double>(substeps);
    for (int s = 0; s < substeps; ++s) {
      rhs(y, k1);
      for (std::size_t c = 0; c < e; ++c) tmp[c] = y[c] + 0.5 * h * k1[c];
      rhs(tmp, k2);
      for (std::size_t c = 0; c < e; ++c) tmp[c] = y[c] + 0.5 * h * k2[c];
      rhs(tmp, k3);
      for (std::size_t c = 0; c < e; ++c) tmp[c] = y[c] + h * k3[c];
      rhs(tmp, k4);
      for (std::size_t c = 0; c < e; ++c)
        y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    double norm = 0.0;
    for (double v : y) norm = std::max(norm, std::abs(v));
    require_numeric(norm <= 1e12, "wong_zakai_solve: state blow-up on segment " + std::to_string(seg));
    for (std::size_t c = 0; c < e; ++c) out.values[(seg + 1) * e + c] = y[c];
  }
  return out;
}

// Solution trajectory as CSV with columns t, y_1..y_e.
inline void write_solution_csv(std::ostream& os, const std::vector<double>& times,
                               const std::vector<std::vector<double>>& states) {
  require(times.size() == states.size(), "write_solution_csv: length mismatch");
  const std::size_t e = states.empty() ? 0 : states.front().size();
  os << "t";
  for (std::size_t c = 1; c <= e; ++c) os << ",y_" << c;
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (double v : states[i]) os << "," << v;
    os << "\n";
  }
}

enum class SchemeKind { kEulerN, kSimplifiedEulerN, kWongZakaiODE };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::kSimplifiedEulerN;
  int level = 1;                    // N for the Euler schemes
  std::vector<double> partition;    // D, a partition of [0,1]
  int substeps = 8;                 // Wong-Zakai only

  void check() const {
    require(level >= 1, "SchemeConfig: level must be >= 1");
    require(partition.size() >= 2, "SchemeConfig: partition needs >= 2 points");
    require(std::abs(partition.front()) <= 1e-15 && std::abs(partition.back() - 1.0) <= 1e-12,
            "SchemeConfig: partition must span [0,1]");
    for (std::size_t i = 1; i < partition.size(); ++i)
      require(partition[i] > partition[i - 1], "SchemeConfig: partition not increasing");
  }
};

// Iterates the chosen one-step map over the partition; returns the state
// trajectory at the points of D (for WongZakaiODE the ODE is solved along the
// full driver and read off at D).
inline std::vector<std::vector<double>> solve(const SchemeConfig& config, const SampledPath& driver,
                                              const VectorFieldSet& V, const std::vector<double>& y0) {
  config.check();
  driver.check();
  std::vector<std::vector<double>> traj;
  traj.reserve(config.partition.size());
  if (config.kind == SchemeKind::kWongZakaiODE) {
    const SampledPath sol = wong_zakai_solve(driver, V, y0, config.substeps);
    for (double t : config.partition) {
      std::vector<double> y(static_cast<std::size_t>(V.state_dim));
      for (int c = 0; c < V.state_dim; ++c) y[static_cast<std::size_t>(c)] = sol.eval(t, c);
      traj.push_back(std::move(y));
    }
    return traj;
  }
  std::vector<double> y = y0;
  traj.push_back(y);
  for (std::size_t j = 0; j + 1 < config.partition.size(); ++j) {
    const double a = config.partition[j];
    const double b = config.partition[j + 1];
    if (config.kind == SchemeKind::kEulerN) {
      const TensorElement sig = path_signature(driver, config.level, a, b);
      y = step_euler_n(y, sig, V, config.level);
    } else {
      std::vector<double> inc(static_cast<std::size_t>(driver.dim));
      for (int c = 0; c < driver.dim; ++c)
        inc[static_cast<std::size_t>(c)] = driver.eval(b, c) - driver.eval(a, c);
      y = step_simplified_euler_n(y, inc, V, config.level);
    }
    traj.push_back(y);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Vector field constructions: linear fields, a bounded smooth nonlinear
// preset with closed-form derivatives, nested finite differences, and affine
// conjugation.
// ---------------------------------------------------------------------------

// V_i(y) = A_i y with A_i given row-major (e x e); first derivative A_i,
// higher derivatives vanish.
inline VectorFieldSet linear_vector_fields(int state_dim, std::vector<std::vector<double>> matrices) {
  const int e = state_dim;
  const int d = static_cast<int>(matrices.size());
  require(d >= 1, "linear_vector_fields: need at least one field");
  for (const auto& m : matrices)
    require(static_cast<int>(m.size()) == e * e, "linear_vector_fields: matrix size mismatch");
  VectorFieldSet V;
  V.state_dim = e;
  V.driver_dim = d;
  V.max_order = 100;  // all higher derivatives are exactly zero
  auto mats = std::make_shared<std::vector<std::vector<double>>>(std::move(matrices));
  V.value = [mats, e](int i, const std::vector<double>& y, std::vector<double>& out) {
    const auto& a = (*mats)[static_cast<std::size_t>(i - 1)];
    out.assign(static_cast<std::size_t>(e), 0.0);
    for (int r = 0; r < e; ++r)
      for (int c = 0; c < e; ++c)
        out[static_cast<std::size_t>(r)] +=
            a[static_cast<std::size_t>(r * e + c)] * y[static_cast<std::size_t>(c)];
  };
  V.derivative = [mats, e](int i, int order, const std::vector<double>&, std::vector<double>& out) {
    const std::size_t tuples = detail::int_pow(static_cast<std::size_t>(e), order);
    out.assign(static_cast<std::size_t>(e) * tuples, 0.0);
    if (order == 1) {
      const auto& a = (*mats)[static_cast<std::size_t>(i - 1)];
      for (int r = 0; r < e; ++r)
        for (int c = 0; c < e; ++c)
          out[static_cast<std::size_t>(r * e + c)] = a[static_cast<std::size_t>(r * e + c)];
    }
  };
  return V;
}

namespace detail {

enum class RidgeKind { kSin, kCos, kSigmoid };

inline double ridge_derivative(RidgeKind kind, int order, double u) {
  constexpr double kHalfPi = 1.57079632679489661923;
  switch (kind) {
    case RidgeKind::kSin:
      return std::sin(u + order * kHalfPi);
    case RidgeKind::kCos:
      return std::cos(u + order * kHalfPi);
    case RidgeKind::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-u));
      const double sp = s * (1.0 - s);
      switch (order) {
        case 0: return s;
        case 1: return sp;
        case 2: return sp * (1.0 - 2.0 * s);
        case 3: return sp * (1.0 - 6.0 * s + 6.0 * s * s);
        case 4: return sp * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s * s * s);
        default: break;
      }
      require(false, "ridge_derivative: sigmoid derivatives available up to order 4");
      return 0.0;
    }
  }
  return 0.0;
}

// One component of a preset field: c * f(w . y + phase); every derivative is
// a closed form, d^m entry (k_1..k_m) = c f^(m)(u) w_{k_1} ... w_{k_m}.
struct Ridge {
  RidgeKind kind;
  double scale;
  std::vector<double> weights;
  double phase;
};

}  // namespace detail

// Bounded smooth nonlinear preset in e = 2, d = 2 built from sine / cosine /
// sigmoid ridges; all derivatives are closed-form and uniformly bounded, so
// the fields are Lip^theta for every finite theta on compacts. Derivatives
// provided up to order 4.
inline VectorFieldSet nonlinear_vector_fields() {
  using detail::Ridge;
  using detail::RidgeKind;
  auto ridges = std::make_shared<std::vector<std::vector<Ridge>>>(std::vector<std::vector<Ridge>>{
      // V_1
      {Ridge{RidgeKind::kCos, 0.8, {0.9, -0.7}, 0.3}, Ridge{RidgeKind::kSigmoid, 1.2, {0.8, 0.5}, -0.2}},
      // V_2
      {Ridge{RidgeKind::kSin, 0.7, {0.6, 0.8}, 0.1}, Ridge{RidgeKind::kCos, 0.9, {0.5, -0.6}, -0.4}},
  });
  VectorFieldSet V;
  V.state_dim = 2;
  V.driver_dim = 2;
  V.max_order = 4;
  V.value = [ridges](int i, const std::vector<double>& y, std::vector<double>& out) {
    const auto& field = (*ridges)[static_cast<std::size_t>(i - 1)];
    out.assign(2, 0.0);
    for (std::size_t comp = 0; comp < 2; ++comp) {
      const Ridge& r = field[comp];
      const double u = r.weights[0] * y[0] + r.weights[1] * y[1] + r.phase;
      out[comp] = r.scale * detail::ridge_derivative(r.kind, 0, u);
    }
  };
  V.derivative = [ridges](int i, int order, const std::vector<double>& y, std::vector<double>& out) {
    const auto& field = (*ridges)[static_cast<std::size_t>(i - 1)];
    const std::size_t tuples = detail::int_pow(2, order);
    out.assign(2 * tuples, 0.0);
    for (std::size_t comp = 0; comp < 2; ++comp) {
      const Ridge& r = field[comp];
      const double u = r.weights[0] * y[0] + r.weights[1] * y[1] + r.phase;
      const double base = r.scale * detail::ridge_derivative(r.kind, order, u);
      for (std::size_t t = 0; t < tuples; ++t) {
        double prod = base;
        std::size_t rem = t;
        for (int a = 0; a < order; ++a) {
          prod *= r.weights[rem % 2];
          rem /= 2;
        }
        out[comp * tuples + t] = prod;
      }
    }
  };
  return V;
}

namespace detail {

// order-m tensor by central differencing the order-(m-1) tensor in its first
// derivative slot.
struct FiniteDifferenceDerivative {
  std::function<void(int i, const std::vector<double>& y, std::vector<double>& out)> value;
  std::size_t e;
  double h;

  void operator()(int i, int order, const std::vector<double>& y, std::vector<double>& out) const {
    const std::size_t tuples = int_pow(e, order);
    out.assign(e * tuples, 0.0);
    const std::size_t inner_tuples = tuples / e;
    std::vector<double> plus, minus;
    for (std::size_t k = 0; k < e; ++k) {
      std::vector<double> yp = y, ym = y;
      yp[k] += h;
      ym[k] -= h;
      if (order == 1) {
        value(i, yp, plus);
        value(i, ym, minus);
      } else {
        (*this)(i, order - 1, yp, plus);
        (*this)(i, order - 1, ym, minus);
      }
      for (std::size_t comp = 0; comp < e; ++comp)
        for (std::size_t rest = 0; rest < inner_tuples; ++rest)
          out[comp * tuples + k * inner_tuples + rest] =
              (plus[comp * inner_tuples + rest] - minus[comp * inner_tuples + rest]) / (2.0 * h);
    }
  }
};

}  // namespace detail

// Wraps a value-only field set with nested central finite differences of step
// h. Orders above 3 are rejected: difference noise dominates there.
inline VectorFieldSet finite_difference_fields(
    int state_dim, int driver_dim,
    std::function<void(int i, const std::vector<double>& y, std::vector<double>& out)> value,
    int max_order, double h) {
  require(max_order <= 3, "finite_difference_fields: orders above 3 are rejected");
  require(h > 0.0, "finite_difference_fields: step must be positive");
  VectorFieldSet V;
  V.state_dim = state_dim;
  V.driver_dim = driver_dim;
  V.max_order = max_order;
  V.value = value;
  V.derivative = detail::FiniteDifferenceDerivative{value, static_cast<std::size_t>(state_dim), h};
  return V;
}

// Conjugates the fields by the affine change of state z = M y + b:
// V~_i(z) = M V_i(M^{-1}(z - b)); derivative slots each pick up a factor of
// M^{-1}. Solving in z-coordinates from z0 = M y0 + b matches M y + b step
// for step.
inline VectorFieldSet affine_conjugate_fields(const VectorFieldSet& base,
                                              const std::vector<double>& m,
                                              const std::vector<double>& m_inv,
                                              const std::vector<double>& b) {
  const int e = base.state_dim;
  const std::size_t eu = static_cast<std::size_t>(e);
  require(m.size() == eu * eu && m_inv.size() == eu * eu && b.size() == eu,
          "affine_conjugate_fields: shape mismatch");
  VectorFieldSet V = base;
  auto pull_back = [m_inv, b, eu](const std::vector<double>& z) {
    std::vector<double> y(eu, 0.0);
    for (std::size_t r = 0; r < eu; ++r)
      for (std::size_t c = 0; c < eu; ++c) y[r] += m_inv[r * eu + c] * (z[c] - b[c]);
    return y;
  };
  V.value = [base, m, eu, pull_back](int i, const std::vector<double>& z, std::vector<double>& out) {
    std::vector<double> inner;
    base.value(i, pull_back(z), inner);
    out.assign(eu, 0.0);
    for (std::size_t r = 0; r < eu; ++r)
      for (std::size_t c = 0; c < eu; ++c) out[r] += m[r * eu + c] * inner[c];
  };
  V.derivative = [base, m, m_inv, eu, pull_back](int i, int order, const std::vector<double>& z,
                                                 std::vector<double>& out) {
    std::vector<double> inner;
    base.derivative(i, order, pull_back(z), inner);
    const std::size_t tuples = detail::int_pow(eu, order);
    out.assign(eu * tuples, 0.0);
    std::vector<std::size_t> tup(static_cast<std::size_t>(order));
    std::vector<std::size_t> ltup(static_cast<std::size_t>(order));
    for (std::size_t comp = 0; comp < eu; ++comp)
      for (std::size_t t = 0; t < tuples; ++t) {
        std::size_t rem = t;
        for (std::size_t a = static_cast<std::size_t>(order); a-- > 0;) {
          tup[a] = rem % eu;
          rem /= eu;
        }
        double acc = 0.0;
        for (std::size_t lt = 0; lt < tuples; ++lt) {
          std::size_t lrem = lt;
          for (std::size_t a = static_cast<std::size_t>(order); a-- > 0;) {
            ltup[a] = lrem % eu;
            lrem /= eu;
          }
          double w = 1.0;
          for (std::size_t a = 0; a < static_cast<std::size_t>(order); ++a)
            w *= m_inv[ltup[a] * eu + tup[a]];
          double mv = 0.0;
          for (std::size_t c = 0; c < eu; ++c) mv += m[comp * eu + c] * inner[c * tuples + lt];
          acc += mv * w;
        }
        out[comp * tuples + t] = acc;
      }
  };
  return V;
}

}  // namespace roughpath
