#pragma once

#include <cstddef>
#include <vector>

#include "roughpath/contract.hpp"
#include "roughpath/path.hpp"
#include "roughpath/tensor_algebra.hpp"
#include "roughpath/words.hpp"

namespace roughpath {

// Signature of the piecewise-linear path over [s,t], truncated at `level`:
// the ordered Chen product of segment exponentials. Segments partially
// covered by [s,t] are split exactly (linear interpolation), so the Chen
// identity holds to machine precision at arbitrary intermediate times, not
// just at sample points.
inline TensorElement path_signature(const SampledPath& x, int level, double s, double t) {
  x.check();
  require(s < t, "path_signature: need s < t");
  require(s >= x.times.front() - 1e-12 && t <= x.times.back() + 1e-12,
          "path_signature: [s,t] outside the sampled range");
  TensorElement sig = tensor_unit(x.dim, level);
  std::vector<double> inc(static_cast<std::size_t>(x.dim));
  for (std::size_t i = 0; i + 1 < x.num_samples(); ++i) {
    const double a = std::max(s, x.times[i]);
    const double b = std::min(t, x.times[i + 1]);
    if (b <= a) continue;
    const double frac = (b - a) / (x.times[i + 1] - x.times[i]);
    for (int c = 0; c < x.dim; ++c)
      inc[static_cast<std::size_t>(c)] = (x.value(i + 1, c) - x.value(i, c)) * frac;
    sig = tensor_mul(sig, tensor_exp(inc, level));
  }
  // level 1 is the bare increment x_t - x_s; writing it directly (instead of
  // keeping the accumulated per-segment sum) removes the summation-order
  // rounding, so nested coarsenings of a path agree bit-for-bit at level 1
  for (int c = 0; c < x.dim; ++c)
    sig.at_level(1)[static_cast<std::size_t>(c)] = x.eval(t, c) - x.eval(s, c);
  return sig;
}

// Coordinate iterated integral x^w over [s,t]: the entry of the level-|w|
// signature indexed by the word. Empty word gives 1.
inline double word_integral(const SampledPath& x, const Word& w, double s, double t) {
  if (w.empty()) return 1.0;
  for (int l : w.letters())
    require(l >= 1 && l <= x.dim, "word_integral: letter out of range for path dimension");
  const TensorElement sig = path_signature(x, static_cast<int>(w.size()), s, t);
  return sig.at_level(static_cast<int>(w.size()))[word_to_index(w.letters(), x.dim)];
}

inline double word_integral(const SampledPath& x, const WordPolynomial& p, double s, double t) {
  double out = 0.0;
  for (const auto& [w, c] : p.terms()) out += static_cast<double>(c) * word_integral(x, w, s, t);
  return out;
}

// Lyons lift of the level-`from_level` signature to `to_level`. For
// piecewise-linear realizations the lift is just the signature recomputed
// from the underlying path at the higher level; `from_level` is kept in the
// interface so callers can state which rough-path level they start from.
inline TensorElement lyons_lift(const SampledPath& x, int from_level, int to_level,
                                double s, double t) {
  require(from_level >= 1, "lyons_lift: from_level must be >= 1");
  require(to_level >= from_level, "lyons_lift: to_level must be >= from_level");
  return path_signature(x, to_level, s, t);
}

}  // namespace roughpath
