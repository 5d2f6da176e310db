#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "roughpath/harness.hpp"

using namespace roughpath;

namespace {

ExperimentSpec small_bm_spec() {
  ExperimentSpec spec;
  spec.model = CovarianceModel::brownian(2);
  spec.meshes = {4, 8, 16};
  spec.ref_mesh = 128;
  spec.mc_count = 16;
  spec.seed = 7;
  spec.preset = "nonlinear";
  return spec;
}

}  // namespace

TEST_CASE("fit_rate: exact power law and degenerate inputs", "[harness]") {
  std::vector<std::size_t> ks{8, 16, 32, 64, 128};
  std::vector<double> half_law, flat;
  for (std::size_t k : ks) {
    half_law.push_back(std::pow(static_cast<double>(k), -0.5));
    flat.push_back(3.7);
  }
  const RateFit f = fit_rate(ks, half_law);
  CHECK(f.slope == Catch::Approx(0.5).margin(1e-12));
  CHECK(f.half_width == Catch::Approx(0.0).margin(1e-12));
  CHECK(fit_rate(ks, flat).slope == Catch::Approx(0.0).margin(1e-12));

  std::vector<double> with_zero = half_law;
  with_zero[2] = 0.0;
  CHECK_THROWS_AS(fit_rate(ks, with_zero), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({8, 16}, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("fit_rate: dominant term of a two-term law", "[harness]") {
  std::vector<std::size_t> ks{8, 16, 32, 64, 128, 256};
  std::vector<double> errs;
  for (std::size_t k : ks)
    errs.push_back(std::pow(static_cast<double>(k), -0.3) +
                   0.5 * std::pow(static_cast<double>(k), -1.0));
  const RateFit f = fit_rate(ks, errs);
  CHECK(f.slope > 0.25);
  CHECK(f.slope < 0.4);
}

TEST_CASE("experiment spec validation", "[harness]") {
  ExperimentSpec spec = small_bm_spec();
  CHECK_NOTHROW(spec.validate());
  spec.meshes = {4, 16, 8};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.meshes = {4, 8, 24};  // 24 does not divide 128
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.meshes = {4, 8, 32};  // 128 < 8 * 32
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("statistics aggregation", "[harness]") {
  const std::vector<double> odd{3.0, 1.0, 2.0};
  CHECK(detail::aggregate(odd, Statistic::kMedian).value == 2.0);
  const std::vector<double> even{4.0, 1.0, 2.0, 3.0};
  CHECK(detail::aggregate(even, Statistic::kMedian).value == 2.5);
  CHECK(detail::aggregate(even, Statistic::kMean).value == 2.5);
  CHECK(detail::aggregate(even, Statistic::kL2).value ==
        Catch::Approx(std::sqrt((16.0 + 1.0 + 4.0 + 9.0) / 4.0)).epsilon(1e-15));
}

TEST_CASE("wong-zakai rate: small Brownian run behaves sanely", "[harness]") {
  const RateReport rep = run_wong_zakai_rate(small_bm_spec());
  REQUIRE(rep.meshes.size() == 3);
  CHECK_FALSE(rep.degenerate);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.errors[i] > 0.0);
    CHECK(rep.excluded[i] == 0);
  }
  // errors refine with the mesh
  CHECK(rep.errors[2] < rep.errors[0]);
  CHECK(rep.slope > 0.0);
  CHECK(rep.target == Catch::Approx(0.5));
}

TEST_CASE("wong-zakai rate: zero fields report a degenerate fit", "[harness]") {
  ExperimentSpec spec = small_bm_spec();
  spec.preset = "zero";
  spec.mc_count = 4;
  const RateReport rep = run_wong_zakai_rate(spec);
  CHECK(rep.degenerate);
  for (double e : rep.errors) CHECK(e == 0.0);
}

TEST_CASE("q-variation error metric", "[harness]") {
  ExperimentSpec spec = small_bm_spec();
  spec.metric = ErrorMetric::kQVariation;
  spec.metric_q = 2.0;
  const RateReport rep = run_wong_zakai_rate(spec);
  CHECK_FALSE(rep.degenerate);
  for (double e : rep.errors) CHECK(e > 0.0);
  // the discrete q-variation dominates the sup of increments of the
  // difference path, so it also shrinks with the mesh here
  CHECK(rep.errors.back() < rep.errors.front());
}

TEST_CASE("reports are bit-identical across worker counts", "[harness]") {
  std::vector<std::string> outputs;
  for (int workers : {1, 2, 8}) {
    ExperimentSpec spec = small_bm_spec();
    spec.workers = workers;
    const RateReport rep = run_wong_zakai_rate(spec);
    std::ostringstream os;
    write_rate_report_csv(os, rep);
    outputs.push_back(os.str());
  }
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("simplified euler rate: small run and target exponents", "[harness]") {
  ExperimentSpec spec = small_bm_spec();
  spec.scheme = SchemeKind::kSimplifiedEulerN;
  spec.scheme_level = 2;
  const RateReport rep = run_simplified_euler_rate(spec);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.errors[2] < rep.errors[0]);
  CHECK(rep.target == Catch::Approx(0.5));  // min(1/2, 3/2 - 1)

  const CovarianceModel fbm = CovarianceModel::fractional(0.4, 2);
  CHECK(simplified_euler_target_rate(fbm, 3) == Catch::Approx(0.3).epsilon(1e-12));
  CHECK(simplified_euler_target_rate(fbm, 4) == Catch::Approx(0.3).epsilon(1e-12));
  CHECK(wong_zakai_target_rate(fbm) == Catch::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("level-l2 rate: level 1 vanishes at shared nodes", "[harness]") {
  ExperimentSpec spec = small_bm_spec();
  spec.mc_count = 8;
  const auto reports = run_level_l2_rate(spec, 2);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].degenerate);  // level-1 increments agree at nodes exactly
  for (double e : reports[0].errors) CHECK(e == 0.0);
  CHECK_FALSE(reports[1].degenerate);
  CHECK(reports[1].errors[2] < reports[1].errors[0]);
  CHECK(reports[1].slope > 0.0);
}

TEST_CASE("rate report CSV format", "[harness]") {
  RateReport rep;
  rep.meshes = {8, 16};
  rep.errors = {0.25, 0.125};
  rep.stderrs = {0.015625, 0.0078125};
  rep.excluded = {0, 1};
  rep.slope = 0.5;
  rep.half_width = 0.0625;
  rep.target = 0.5;
  std::ostringstream os;
  write_rate_report_csv(os, rep);
  CHECK(os.str() ==
        "k,stat_error,stderr,n_excluded\n"
        "8,0.25,0.015625,0\n"
        "16,0.125,0.0078125,1\n"
        "0.5,0.0625,0.5\n");
}
