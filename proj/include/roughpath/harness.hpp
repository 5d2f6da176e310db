#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "roughpath/contract.hpp"
#include "roughpath/gaussian.hpp"
#include "roughpath/rde.hpp"
#include "roughpath/signatures.hpp"

namespace roughpath {

enum class Statistic { kMedian, kMean, kL2 };

inline Statistic statistic_from_string(const std::string& s) {
  if (s == "median") return Statistic::kMedian;
  if (s == "mean") return Statistic::kMean;
  if (s == "l2") return Statistic::kL2;
  require(false, "unknown statistic: " + s);
  return Statistic::kMedian;
}

enum class ErrorMetric { kSupNorm, kQVariation };

struct ExperimentSpec {
  CovarianceModel model;
  std::vector<std::size_t> meshes;  // strictly increasing, all dividing ref_mesh
  std::size_t ref_mesh = 2048;
  std::size_t mc_count = 64;
  std::uint64_t seed = 42;
  SchemeKind scheme = SchemeKind::kWongZakaiODE;
  int scheme_level = 2;  // N for the Euler schemes
  std::string preset = "nonlinear";
  ErrorMetric metric = ErrorMetric::kSupNorm;
  double metric_q = 2.0;  // only for the q-variation metric
  Statistic statistic = Statistic::kMedian;
  int workers = 1;
  std::vector<double> y0 = {0.4, 0.1};

  void validate() const {
    model.validate();
    require(!meshes.empty(), "ExperimentSpec: mesh list is empty");
    require(mc_count >= 2, "ExperimentSpec: need at least 2 trajectories");
    require(workers >= 1, "ExperimentSpec: workers must be >= 1");
    for (std::size_t i = 1; i < meshes.size(); ++i)
      require(meshes[i] > meshes[i - 1], "ExperimentSpec: meshes must be strictly increasing");
    for (std::size_t k : meshes) {
      require(ref_mesh % k == 0, "ExperimentSpec: every mesh must divide the reference mesh");
    }
    require(ref_mesh >= 8 * meshes.back(), "ExperimentSpec: reference mesh must be >= 8x finest mesh");
  }
};

struct RateReport {
  std::vector<std::size_t> meshes;
  std::vector<double> errors;        // chosen statistic per mesh
  std::vector<double> stderrs;       // Monte-Carlo standard error of that statistic
  std::vector<std::size_t> excluded; // diverged trajectories per mesh
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 2 x standard error of the slope
  double target = 0.0;      // theoretical rate for the configuration
  bool degenerate = false;  // all errors vanished; no fit performed
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
};

// Ordinary least squares of log(error) on log(1/k); half-width is twice the
// standard error of the slope.
inline RateFit fit_rate(const std::vector<std::size_t>& meshes, const std::vector<double>& errors) {
  require(meshes.size() == errors.size(), "fit_rate: size mismatch");
  require(meshes.size() >= 3, "fit_rate: need at least 3 mesh points");
  const std::size_t n = meshes.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(errors[i] > 0.0, "fit_rate: errors must be positive");
    xs[i] = -std::log(static_cast<double>(meshes[i]));  // log(1/k)
    ys[i] = std::log(errors[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  if (n > 2) fit.half_width = 2.0 * std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return fit;
}

namespace detail {

// Contiguous-chunk trajectory parallelism. Each index writes only its own
// slot and all aggregation happens afterwards in index order, so results are
// identical for any worker count.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> threads;
  threads.reserve(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

struct StatResult {
  double value = 0.0;
  double stderr_est = 0.0;
};

// Statistic over finite samples with a Monte-Carlo standard error: exact for
// the mean, delta method for L2, and the normal-approximation factor
// sqrt(pi/2) for the median.
inline StatResult aggregate(const std::vector<double>& samples, Statistic stat) {
  require(!samples.empty(), "aggregate: no samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var = samples.size() > 1 ? var / (n - 1.0) : 0.0;
  const double se_mean = std::sqrt(var / n);
  StatResult out;
  switch (stat) {
    case Statistic::kMean:
      out.value = mean;
      out.stderr_est = se_mean;
      break;
    case Statistic::kMedian: {
      std::vector<double> sorted = samples;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t m = sorted.size();
      out.value = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
      out.stderr_est = 1.2533141373155003 * se_mean;
      break;
    }
    case Statistic::kL2: {
      double mean_sq = 0.0;
      for (double v : samples) mean_sq += v * v;
      mean_sq /= n;
      double var_sq = 0.0;
      for (double v : samples) var_sq += (v * v - mean_sq) * (v * v - mean_sq);
      var_sq = samples.size() > 1 ? var_sq / (n - 1.0) : 0.0;
      out.value = std::sqrt(mean_sq);
      out.stderr_est = out.value > 0.0 ? 0.5 * std::sqrt(var_sq / n) / out.value : 0.0;
      break;
    }
  }
  return out;
}

inline double trajectory_error(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b, ErrorMetric metric,
                               double q) {
  require(a.size() == b.size(), "trajectory_error: length mismatch");
  if (metric == ErrorMetric::kSupNorm) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t c = 0; c < a[i].size(); ++c)
        m = std::max(m, std::abs(a[i][c] - b[i][c]));
    return m;
  }
  // discrete q-variation of the difference path over the grid
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    double inc = 0.0;
    for (std::size_t c = 0; c < a[i].size(); ++c) {
      const double d = (a[i + 1][c] - b[i + 1][c]) - (a[i][c] - b[i][c]);
      inc += d * d;
    }
    s += std::pow(std::sqrt(inc), q);
  }
  return std::pow(s, 1.0 / q);
}

inline VectorFieldSet preset_fields(const std::string& name) {
  if (name == "nonlinear") return nonlinear_vector_fields();
  if (name == "linear")
    return linear_vector_fields(2, {{0.0, -0.8, 0.8, 0.0}, {0.5, 0.2, -0.3, 0.4}});
  if (name == "zero") return linear_vector_fields(2, {{0, 0, 0, 0}, {0, 0, 0, 0}});
  require(false, "unknown vector-field preset: " + name);
  return {};
}

inline std::vector<double> uniform_partition(std::size_t k) {
  std::vector<double> d(k + 1);
  for (std::size_t j = 0; j <= k; ++j) d[j] = static_cast<double>(j) / static_cast<double>(k);
  return d;
}

constexpr int kReferenceSubsteps = 8;

// Assembles the per-mesh statistics and the fitted slope; flags the
// all-zero-error case as degenerate instead of fitting.
inline RateReport finalize_report(const ExperimentSpec& spec,
                                  const std::vector<std::vector<double>>& per_mesh_errors,
                                  const std::vector<std::size_t>& excluded, double target) {
  RateReport rep;
  rep.meshes = spec.meshes;
  rep.excluded = excluded;
  rep.target = target;
  bool all_zero = true;
  for (std::size_t ki = 0; ki < spec.meshes.size(); ++ki) {
    require_numeric(excluded[ki] * 20 <= spec.mc_count,
                    "rate run failed: more than 5% of trajectories diverged");
    const StatResult s = aggregate(per_mesh_errors[ki], spec.statistic);
    rep.errors.push_back(s.value);
    rep.stderrs.push_back(s.stderr_est);
    if (s.value != 0.0) all_zero = false;
  }
  if (all_zero) {
    rep.degenerate = true;
    return rep;
  }
  const RateFit fit = fit_rate(rep.meshes, rep.errors);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.half_width = fit.half_width;
  return rep;
}

}  // namespace detail

// Theoretical Wong-Zakai / simplified-Euler target rate for smooth bounded
// fields (theta = infinity): 1/rho - 1/2 = 2H - 1/2.
inline double wong_zakai_target_rate(const CovarianceModel& model) {
  return 1.0 / model.rho() - 0.5;
}

// Two-term simplified Euler exponent min(eta, (N+1)/p - 1) at p = 2 rho.
inline double simplified_euler_target_rate(const CovarianceModel& model, int level) {
  const double p = 2.0 * model.rho();
  return std::min(wong_zakai_target_rate(model), (level + 1) / p - 1.0);
}

// Wong-Zakai convergence rate: per trajectory, the driver is sampled once on
// the reference mesh, the reference solution is the Wong-Zakai solve on that
// mesh, and each coarse error is measured at the points of D_k against it.
inline RateReport run_wong_zakai_rate(const ExperimentSpec& spec) {
  spec.validate();
  const VectorFieldSet fields = detail::preset_fields(spec.preset);
  require(static_cast<int>(spec.y0.size()) == fields.state_dim,
          "run_wong_zakai_rate: y0 dimension mismatch");
  GaussianSampler sampler(spec.model, spec.ref_mesh, spec.seed);

  const std::size_t nk = spec.meshes.size();
  std::vector<std::vector<double>> errors(nk, std::vector<double>(spec.mc_count, -1.0));
  detail::parallel_for(spec.mc_count, spec.workers, [&](std::size_t traj) {
    const SampledPath path = sampler.sample(static_cast<std::uint32_t>(traj));
    try {
      const SampledPath ref_sol = wong_zakai_solve(path, fields, spec.y0, detail::kReferenceSubsteps);
      for (std::size_t ki = 0; ki < nk; ++ki) {
        const std::size_t k = spec.meshes[ki];
        const std::size_t stride = spec.ref_mesh / k;
        const SampledPath coarse = coarsen_uniform(path, k);
        // keep the total number of one-step-method steps at the reference
        // level so the ODE integration error stays far below the measured
        // Wong-Zakai error on every mesh
        const int substeps = std::max<int>(detail::kReferenceSubsteps, static_cast<int>(stride));
        const SampledPath sol = wong_zakai_solve(coarse, fields, spec.y0, substeps);
        std::vector<std::vector<double>> a, b;
        for (std::size_t j = 0; j <= k; ++j) {
          std::vector<double> ya(sol.values.begin() + static_cast<std::ptrdiff_t>(j * spec.y0.size()),
                                 sol.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * spec.y0.size()));
          std::vector<double> yb(
              ref_sol.values.begin() + static_cast<std::ptrdiff_t>(j * stride * spec.y0.size()),
              ref_sol.values.begin() + static_cast<std::ptrdiff_t>((j * stride + 1) * spec.y0.size()));
          a.push_back(std::move(ya));
          b.push_back(std::move(yb));
        }
        errors[ki][traj] = detail::trajectory_error(a, b, spec.metric, spec.metric_q);
      }
    } catch (const std::runtime_error&) {
      // diverged: leave the sentinel in place for every mesh of this trajectory
    }
  });

  std::vector<std::vector<double>> kept(nk);
  std::vector<std::size_t> excluded(nk, 0);
  for (std::size_t ki = 0; ki < nk; ++ki)
    for (std::size_t t = 0; t < spec.mc_count; ++t) {
      if (errors[ki][t] < 0.0)
        ++excluded[ki];
      else
        kept[ki].push_back(errors[ki][t]);
    }
  return detail::finalize_report(spec, kept, excluded, wong_zakai_target_rate(spec.model));
}

// Simplified step-N Euler rate against the Wong-Zakai reference on the
// reference mesh; errors measured at the points of D_k.
inline RateReport run_simplified_euler_rate(const ExperimentSpec& spec) {
  spec.validate();
  require(spec.scheme_level >= 1 && spec.scheme_level <= 4,
          "run_simplified_euler_rate: level must be 1..4");
  const VectorFieldSet fields = detail::preset_fields(spec.preset);
  require(static_cast<int>(spec.y0.size()) == fields.state_dim,
          "run_simplified_euler_rate: y0 dimension mismatch");
  GaussianSampler sampler(spec.model, spec.ref_mesh, spec.seed);

  const std::size_t nk = spec.meshes.size();
  std::vector<std::vector<double>> errors(nk, std::vector<double>(spec.mc_count, -1.0));
  detail::parallel_for(spec.mc_count, spec.workers, [&](std::size_t traj) {
    const SampledPath path = sampler.sample(static_cast<std::uint32_t>(traj));
    try {
      const SampledPath ref_sol = wong_zakai_solve(path, fields, spec.y0, detail::kReferenceSubsteps);
      for (std::size_t ki = 0; ki < nk; ++ki) {
        const std::size_t k = spec.meshes[ki];
        const std::size_t stride = spec.ref_mesh / k;
        SchemeConfig config;
        config.kind = SchemeKind::kSimplifiedEulerN;
        config.level = spec.scheme_level;
        config.partition = detail::uniform_partition(k);
        const auto scheme_traj = solve(config, path, fields, spec.y0);
        std::vector<std::vector<double>> b;
        for (std::size_t j = 0; j <= k; ++j)
          b.emplace_back(
              ref_sol.values.begin() + static_cast<std::ptrdiff_t>(j * stride * spec.y0.size()),
              ref_sol.values.begin() + static_cast<std::ptrdiff_t>((j * stride + 1) * spec.y0.size()));
        errors[ki][traj] = detail::trajectory_error(scheme_traj, b, spec.metric, spec.metric_q);
      }
    } catch (const std::runtime_error&) {
    }
  });

  std::vector<std::vector<double>> kept(nk);
  std::vector<std::size_t> excluded(nk, 0);
  for (std::size_t ki = 0; ki < nk; ++ki)
    for (std::size_t t = 0; t < spec.mc_count; ++t) {
      if (errors[ki][t] < 0.0)
        ++excluded[ki];
      else
        kept[ki].push_back(errors[ki][t]);
    }
  return detail::finalize_report(spec, kept, excluded,
                                 simplified_euler_target_rate(spec.model, spec.scheme_level));
}

// L2 rate of the level-n signature difference between the coarse and the
// reference piecewise-linear lift, per level n = 1..max_level. Level 1
// vanishes identically at shared nodes, so its report is degenerate by
// construction.
inline std::vector<RateReport> run_level_l2_rate(const ExperimentSpec& spec, int max_level) {
  spec.validate();
  require(max_level >= 1 && max_level <= 4, "run_level_l2_rate: level must be 1..4");
  GaussianSampler sampler(spec.model, spec.ref_mesh, spec.seed);
  const std::size_t nk = spec.meshes.size();
  const std::size_t nl = static_cast<std::size_t>(max_level);

  // per level, per mesh, per trajectory: |pi_n(coarse) - pi_n(ref)|
  std::vector<std::vector<std::vector<double>>> diffs(
      nl, std::vector<std::vector<double>>(nk, std::vector<double>(spec.mc_count, 0.0)));
  detail::parallel_for(spec.mc_count, spec.workers, [&](std::size_t traj) {
    const SampledPath path = sampler.sample(static_cast<std::uint32_t>(traj));
    const TensorElement ref_sig = path_signature(path, max_level, 0.0, 1.0);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const SampledPath coarse = coarsen_uniform(path, spec.meshes[ki]);
      const TensorElement sig = path_signature(coarse, max_level, 0.0, 1.0);
      for (int n = 1; n <= max_level; ++n) {
        double s = 0.0;
        const auto& a = sig.at_level(n);
        const auto& b = ref_sig.at_level(n);
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        diffs[static_cast<std::size_t>(n - 1)][ki][traj] = std::sqrt(s);
      }
    }
  });

  std::vector<RateReport> reports;
  ExperimentSpec level_spec = spec;
  level_spec.statistic = Statistic::kL2;  // the measured quantity is an L2 norm
  for (std::size_t n = 0; n < nl; ++n) {
    std::vector<std::size_t> excluded(nk, 0);
    reports.push_back(
        detail::finalize_report(level_spec, diffs[n], excluded, wong_zakai_target_rate(spec.model)));
  }
  return reports;
}

// CSV report: data rows under "k,stat_error,stderr,n_excluded", then one
// footer line with the fitted slope, its half-width and the target rate.
inline void write_rate_report_csv(std::ostream& os, const RateReport& rep) {
  os << "k,stat_error,stderr,n_excluded\n";
  os.precision(17);
  for (std::size_t i = 0; i < rep.meshes.size(); ++i)
    os << rep.meshes[i] << "," << rep.errors[i] << "," << rep.stderrs[i] << "," << rep.excluded[i]
       << "\n";
  if (rep.degenerate)
    os << "degenerate,degenerate," << rep.target << "\n";
  else
    os << rep.slope << "," << rep.half_width << "," << rep.target << "\n";
}

}  // namespace roughpath
