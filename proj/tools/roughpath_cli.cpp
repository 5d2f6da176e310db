// Command-line front end: trajectory sampling, signatures, shuffle-algebra
// queries, covariance rho-variation, and the Monte-Carlo convergence-rate
// experiments with CSV reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roughpath/gaussian.hpp"
#include "roughpath/harness.hpp"
#include "roughpath/rde.hpp"
#include "roughpath/signatures.hpp"
#include "roughpath/tensor_algebra.hpp"
#include "roughpath/words.hpp"
#include "roughpath/young.hpp"

namespace {

using namespace roughpath;

constexpr double kSlopeBandHalfWidth = 0.15;

struct ModelOptions {
  std::string model = "bm";
  double hurst = 0.5;
  int dimension = 2;

  CovarianceModel build() const {
    if (model == "bm") return CovarianceModel::brownian(dimension);
    if (model == "fbm") return CovarianceModel::fractional(hurst, dimension);
    throw CLI::ValidationError("--model must be bm or fbm");
  }
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--model", opts.model, "driver model: bm or fbm")
      ->check(CLI::IsMember({"bm", "fbm"}));
  cmd->add_option("--hurst", opts.hurst, "Hurst parameter for fbm, in (1/4, 1/2]");
  cmd->add_option("--dim", opts.dimension, "number of independent components");
}

struct RateOptions {
  ModelOptions model;
  std::vector<std::size_t> meshes{8, 16, 32, 64, 128, 256};
  std::size_t ref_mesh = 2048;
  std::size_t mc = 64;
  std::uint64_t seed = 42;
  std::string preset = "nonlinear";
  std::string stat = "median";
  int workers = 1;
  int scheme_n = 2;
  int level = 2;
  std::string out;
};

void add_rate_options(CLI::App* cmd, RateOptions& opts) {
  add_model_options(cmd, opts.model);
  cmd->add_option("--meshes", opts.meshes, "comma-separated mesh sizes k")->delimiter(',');
  cmd->add_option("--ref-mesh", opts.ref_mesh, "reference mesh (>= 8x finest, all k divide it)");
  cmd->add_option("--mc", opts.mc, "Monte-Carlo trajectory count");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--preset", opts.preset, "vector-field preset: nonlinear, linear, zero");
  cmd->add_option("--stat", opts.stat, "statistic: median, mean or l2")
      ->check(CLI::IsMember({"median", "mean", "l2"}));
  cmd->add_option("--workers", opts.workers, "worker threads (output is identical for any count)");
  cmd->add_option("--out", opts.out, "output CSV path (stdout when omitted)");
}

// Flat key=value config support: "--config FILE" is stripped from the raw
// argument list and each "key=value" line becomes "--key value" appended at
// the end, unless that flag was given explicitly (explicit flags override the
// file). Lines starting with '#' and blank lines are skipped.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  std::ifstream f(file);
  if (!f.good()) throw std::runtime_error("cannot open config file: " + file);
  auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
  };
  std::string line;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line is not key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
    if (!overridden) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

ExperimentSpec build_spec(const RateOptions& opts) {
  ExperimentSpec spec;
  spec.model = opts.model.build();
  spec.meshes = opts.meshes;
  spec.ref_mesh = opts.ref_mesh;
  spec.mc_count = opts.mc;
  spec.seed = opts.seed;
  spec.preset = opts.preset;
  spec.statistic = statistic_from_string(opts.stat);
  spec.workers = opts.workers;
  spec.scheme_level = opts.scheme_n;
  return spec;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f.good()) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

// exit code contract: 0 iff the fitted slope lies inside the acceptance band
// around the theoretical target
int check_band(const RateReport& rep) {
  if (rep.degenerate) {
    std::cerr << "degenerate run: all errors vanished\n";
    return 1;
  }
  const double lo = rep.target - kSlopeBandHalfWidth;
  const double hi = rep.target + kSlopeBandHalfWidth;
  std::cerr << "slope " << rep.slope << " vs band [" << lo << ", " << hi << "]\n";
  return (rep.slope >= lo && rep.slope <= hi) ? 0 : 1;
}

std::string report_csv(const RateReport& rep) {
  std::ostringstream os;
  write_rate_report_csv(os, rep);
  return os.str();
}

int run_sample(const ModelOptions& model_opts, std::size_t mesh, std::size_t mc,
               std::uint64_t seed, const std::string& out, bool long_format) {
  const CovarianceModel model = model_opts.build();
  GaussianSampler sampler(model, mesh, seed);
  if (long_format) {
    std::ostringstream os;
    os << "trajectory,time";
    for (int c = 0; c < model.dimension; ++c) os << ",comp_" << (c + 1);
    os << "\n";
    os.precision(17);
    for (std::size_t traj = 0; traj < mc; ++traj) {
      const SampledPath p = sampler.sample(static_cast<std::uint32_t>(traj));
      for (std::size_t i = 0; i < p.num_samples(); ++i) {
        os << traj << "," << p.times[i];
        for (int c = 0; c < model.dimension; ++c) os << "," << p.value(i, c);
        os << "\n";
      }
    }
    write_text(out, os.str());
    return 0;
  }
  if (out.empty()) throw std::runtime_error("per-trajectory output needs --out as a file prefix");
  for (std::size_t traj = 0; traj < mc; ++traj) {
    const SampledPath p = sampler.sample(static_cast<std::uint32_t>(traj));
    std::ofstream f(out + ".traj" + std::to_string(traj) + ".csv");
    write_path_csv(f, p);
  }
  return 0;
}

int run_shuffle_query(const std::string& op, const std::vector<std::string>& words) {
  if (op == "shuffle") {
    if (words.size() != 2) throw std::runtime_error("shuffle needs two words");
    std::cout << shuffle(Word::from_string(words[0]), Word::from_string(words[1])).to_string()
              << "\n";
  } else if (op == "lyndon") {
    if (words.size() != 1) throw std::runtime_error("lyndon needs one word");
    std::cout << (is_lyndon(Word::from_string(words[0])) ? "true" : "false") << "\n";
  } else if (op == "factorize") {
    if (words.size() != 1) throw std::runtime_error("factorize needs one word");
    const auto factors = lyndon_factorization(Word::from_string(words[0]));
    std::string s;
    for (const auto& [w, mult] : factors) {
      if (!s.empty()) s += " ";
      s += "(" + w.to_string() + ")^" + std::to_string(mult);
    }
    std::cout << s << "\n";
  } else if (op == "expand") {
    if (words.size() != 1) throw std::runtime_error("expand needs one word");
    const auto ex = lyndon_shuffle_expansion(Word::from_string(words[0]));
    std::cout << "1*" << ex.leading.to_string();
    if (!ex.correction.empty()) std::cout << " + " << ex.correction.to_string();
    std::cout << "\n";
  } else if (op == "generating-set") {
    if (words.size() != 1) throw std::runtime_error("generating-set needs one multiset word");
    const Word w = Word::from_string(words[0]);
    std::string s;
    for (const Word& g : generating_set(w.letter_counts())) {
      if (!s.empty()) s += " ";
      s += g.to_string();
    }
    std::cout << s << "\n";
  } else {
    throw std::runtime_error("unknown op: " + op);
  }
  return 0;
}

int run_identity_checks(std::uint64_t seed, std::size_t mc) {
  int failures = 0;
  auto report = [&failures](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name << "\n";
    if (!ok) ++failures;
  };

  {  // Chen identity on random piecewise-linear paths
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::normal_distribution<double> normal(0.0, 0.8);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      SampledPath p = uniform_grid_path(3, 6);
      for (std::size_t i = 1; i <= 6; ++i)
        for (int c = 0; c < 3; ++c) p.value(i, c) = p.value(i - 1, c) + normal(rng);
      const TensorElement whole = path_signature(p, 5, 0.05, 0.95);
      const TensorElement parts =
          tensor_mul(path_signature(p, 5, 0.05, 0.4), path_signature(p, 5, 0.4, 0.95));
      double diff = 0.0, scale = 1.0;
      for (int n = 0; n <= 5; ++n) {
        const auto& a = whole.at_level(n);
        const auto& b = parts.at_level(n);
        for (std::size_t i = 0; i < a.size(); ++i) {
          diff = std::max(diff, std::abs(a[i] - b[i]));
          scale = std::max(scale, std::abs(a[i]));
        }
      }
      ok = diff / scale < 1e-10;
    }
    report("chen-identity", ok);
  }

  {  // shuffle homomorphism on one random path
    std::mt19937 rng(static_cast<unsigned>(seed) + 1);
    std::normal_distribution<double> normal(0.0, 0.8);
    SampledPath p = uniform_grid_path(2, 5);
    for (std::size_t i = 1; i <= 5; ++i)
      for (int c = 0; c < 2; ++c) p.value(i, c) = p.value(i - 1, c) + normal(rng);
    bool ok = true;
    for (const char* us : {"a", "b", "ab", "ba", "aab"})
      for (const char* vs : {"a", "b", "ab"}) {
        const Word u = Word::from_string(us), v = Word::from_string(vs);
        if (u.size() + v.size() > 5) continue;
        const double lhs = word_integral(p, u, 0.0, 1.0) * word_integral(p, v, 0.0, 1.0);
        const double rhs = word_integral(p, shuffle(u, v), 0.0, 1.0);
        if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs))) ok = false;
      }
    report("shuffle-homomorphism", ok);
  }

  {  // Fubini diagonal trick: 1/6 vs 1/3 and the exact discrete identity
    const std::size_t n = 4000;
    std::vector<double> id(n + 1);
    for (std::size_t i = 0; i <= n; ++i) id[i] = static_cast<double>(i) / n;
    const FubiniDiagResult r = fubini_diag(id, id, n);
    report("fubini-simplex-1/6", std::abs(r.iterated - 1.0 / 6.0) < 1e-3);
    report("fubini-naive-1/3", std::abs(r.naive_outer - 1.0 / 3.0) < 1e-3);
    report("fubini-diagonal-identity",
           std::abs(r.half_diag - r.iterated) < 1e-6 * std::abs(r.iterated));
  }

  {  // covariance L2 identity for Brownian motion
    const CovarianceL2Check chk =
        covariance_l2_identity_check(CovarianceModel::brownian(2), 128, mc, seed);
    const bool ok = std::abs(chk.mc_estimate - chk.young_value) <
                    3.0 * chk.mc_stderr + 0.02 * chk.young_value;
    report("covariance-l2-identity", ok);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough-path numerics toolkit"};
  app.require_subcommand(1);
  std::string config_file_doc;  // consumed before parsing, kept for --help

  // ---- sample ----
  ModelOptions sample_model;
  std::size_t sample_mesh = 256, sample_mc = 1;
  std::uint64_t sample_seed = 42;
  std::string sample_out;
  bool sample_long = false;
  CLI::App* sample = app.add_subcommand("sample", "emit Gaussian driver trajectories as CSV");
  add_model_options(sample, sample_model);
  sample->add_option("--mesh", sample_mesh, "uniform grid intervals");
  sample->add_option("--mc", sample_mc, "number of trajectories");
  sample->add_option("--seed", sample_seed, "RNG seed");
  sample->add_option("--out", sample_out, "output path (prefix in per-trajectory mode)");
  sample->add_flag("--long-format", sample_long, "single long-format file with a trajectory column");
  sample->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  // ---- signature ----
  std::string sig_in, sig_out;
  int sig_level = 4;
  double sig_from = 0.0, sig_to = 1.0;
  CLI::App* sig = app.add_subcommand("signature", "signature of a path file as a tensor CSV");
  sig->add_option("--in", sig_in, "input path CSV (time, comp_1..comp_d)")->required();
  sig->add_option("--level", sig_level, "truncation level");
  sig->add_option("--from", sig_from, "interval start");
  sig->add_option("--to", sig_to, "interval end");
  sig->add_option("--out", sig_out, "output CSV path (stdout when omitted)");
  sig->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  // ---- shuffle ----
  std::string shuffle_op = "shuffle";
  std::vector<std::string> shuffle_words;
  CLI::App* shf = app.add_subcommand("shuffle", "shuffle-algebra queries on words");
  shf->add_option("--op", shuffle_op, "shuffle | lyndon | factorize | expand | generating-set");
  shf->add_option("words", shuffle_words, "word arguments (ASCII over abc...)");
  shf->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  // ---- var2d ----
  ModelOptions var_model;
  double var_rho = 0.0;
  std::size_t var_mesh = 12;
  std::vector<double> var_rect{0.0, 1.0, 0.0, 1.0};
  bool var_modulus = false;
  std::size_t var_partition = 16;
  CLI::App* var = app.add_subcommand("var2d", "grid rho-variation of a model covariance");
  add_model_options(var, var_model);
  var->add_option("--rho", var_rho, "variation exponent (default 1/(2H))");
  var->add_option("--mesh", var_mesh, "grid intervals per axis");
  var->add_option("--rect", var_rect, "rectangle s,t,u,v")->delimiter(',')->expected(4);
  var->add_flag("--modulus", var_modulus, "also print |D_k|_{R,rho} for the uniform partition");
  var->add_option("--partition", var_partition, "k for the uniform partition in --modulus");
  var->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  // ---- rate experiments ----
  RateOptions wz_opts;
  CLI::App* wz = app.add_subcommand("wz-rate", "Wong-Zakai convergence rate experiment");
  add_rate_options(wz, wz_opts);
  wz->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  RateOptions euler_opts;
  CLI::App* euler = app.add_subcommand("euler-rate", "simplified step-N Euler rate experiment");
  add_rate_options(euler, euler_opts);
  euler->add_option("--scheme-n", euler_opts.scheme_n, "scheme level N");
  euler->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  RateOptions level_opts;
  CLI::App* level = app.add_subcommand("level-rate", "level-n signature L2 rate experiment");
  add_rate_options(level, level_opts);
  level->add_option("--level", level_opts.level, "maximum signature level");
  level->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  // ---- identity-checks ----
  std::uint64_t idc_seed = 42;
  std::size_t idc_mc = 4000;
  CLI::App* idc = app.add_subcommand("identity-checks",
                                     "run the Fubini/covariance/Chen/shuffle identity suites");
  idc->add_option("--seed", idc_seed, "RNG seed");
  idc->add_option("--mc", idc_mc, "Monte-Carlo samples for the covariance identity");
  idc->add_option("--config", config_file_doc, "flat key=value config file; explicit flags override");

  try {
    std::vector<std::string> args = merge_config_args({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());  // CLI11's vector parse pops from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    if (sample->parsed())
      return run_sample(sample_model, sample_mesh, sample_mc, sample_seed, sample_out, sample_long);

    if (sig->parsed()) {
      const SampledPath p = read_path_file(sig_in);
      const TensorElement t = path_signature(p, sig_level, sig_from, sig_to);
      std::ostringstream os;
      write_tensor_csv(os, t);
      write_text(sig_out, os.str());
      return 0;
    }

    if (shf->parsed()) return run_shuffle_query(shuffle_op, shuffle_words);

    if (var->parsed()) {
      const CovarianceModel model = var_model.build();
      const double rho = var_rho > 0.0 ? var_rho : model.rho();
      const VariationResult r = grid_rho_variation(model, var_rect[0], var_rect[1], var_rect[2],
                                                   var_rect[3], rho, var_mesh);
      std::cout.precision(17);
      std::cout << "V_rho," << r.value << ",exact," << (r.exact ? 1 : 0) << "\n";
      if (var_modulus) {
        std::vector<double> d(var_partition + 1);
        for (std::size_t j = 0; j <= var_partition; ++j)
          d[j] = static_cast<double>(j) / static_cast<double>(var_partition);
        std::cout << "mesh_modulus," << mesh_covariance_modulus(model, d, rho) << "\n";
      }
      return 0;
    }

    if (wz->parsed()) {
      const RateReport rep = run_wong_zakai_rate(build_spec(wz_opts));
      write_text(wz_opts.out, report_csv(rep));
      return check_band(rep);
    }

    if (euler->parsed()) {
      ExperimentSpec spec = build_spec(euler_opts);
      spec.scheme = SchemeKind::kSimplifiedEulerN;
      const RateReport rep = run_simplified_euler_rate(spec);
      write_text(euler_opts.out, report_csv(rep));
      return check_band(rep);
    }

    if (level->parsed()) {
      const auto reports = run_level_l2_rate(build_spec(level_opts), level_opts.level);
      std::ostringstream os;
      int code = 0;
      for (std::size_t n = 0; n < reports.size(); ++n) {
        os << "# level " << (n + 1) << "\n" << report_csv(reports[n]);
        if (n == 0) {
          // level 1 must vanish at shared nodes
          for (double e : reports[n].errors)
            if (e != 0.0) code = 1;
        } else {
          if (check_band(reports[n]) != 0) code = 1;
        }
      }
      write_text(level_opts.out, os.str());
      return code;
    }

    if (idc->parsed()) return run_identity_checks(idc_seed, idc_mc);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
