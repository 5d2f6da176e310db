#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "roughpath/tensor_algebra.hpp"

using namespace roughpath;

namespace {

std::vector<double> random_vector(std::mt19937& rng, int d, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = normal(rng);
  return v;
}

TensorElement random_group_like(std::mt19937& rng, int d, int level) {
  // product of a few segment exponentials: group-like by construction
  TensorElement g = tensor_exp(random_vector(rng, d, 0.7), level);
  for (int i = 0; i < 3; ++i) g = tensor_mul(g, tensor_exp(random_vector(rng, d, 0.7), level));
  return g;
}

double max_abs_diff(const TensorElement& a, const TensorElement& b) {
  double m = 0.0;
  for (int n = 0; n <= a.level(); ++n) {
    const auto& x = a.at_level(n);
    const auto& y = b.at_level(n);
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

// Brute-force oracle for the grid rho_{p-var} distance: every sub-partition of
// the grid is enumerated and increments over merged cells are rebuilt by
// multiplying the cell increments directly.
double rho_pvar_bruteforce(const std::vector<TensorElement>& xs, const std::vector<TensorElement>& ys,
                           double p) {
  const std::size_t K = xs.size();
  const int N = xs[0].level();
  double result = 0.0;
  for (int n = 1; n <= N; ++n) {
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << (K - 1)); ++mask) {
      std::vector<std::size_t> bounds{0};
      for (std::size_t b = 0; b + 1 < K; ++b)
        if (mask & (1u << b)) bounds.push_back(b + 1);
      bounds.push_back(K);
      double sum = 0.0;
      for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        TensorElement xi = tensor_unit(xs[0].dim(), N);
        TensorElement yi = tensor_unit(xs[0].dim(), N);
        for (std::size_t i = bounds[seg]; i < bounds[seg + 1]; ++i) {
          xi = tensor_mul(xi, xs[i]);
          yi = tensor_mul(yi, ys[i]);
        }
        double norm_sq = 0.0;
        const auto& a = xi.at_level(n);
        const auto& b = yi.at_level(n);
        for (std::size_t i = 0; i < a.size(); ++i) norm_sq += (a[i] - b[i]) * (a[i] - b[i]);
        sum += std::pow(std::sqrt(norm_sq), p / n);
      }
      best = std::max(best, sum);
    }
    result = std::max(result, std::pow(best, n / p));
  }
  return result;
}

}  // namespace

TEST_CASE("tensor product: unit element and 1D exponentials", "[tensor]") {
  std::mt19937 rng(7);
  const TensorElement unit = tensor_unit(3, 4);
  const TensorElement g = random_group_like(rng, 3, 4);
  CHECK(max_abs_diff(tensor_mul(unit, g), g) == 0.0);
  CHECK(max_abs_diff(tensor_mul(g, unit), g) == 0.0);

  // d=1: exp(a) exp(b) = exp(a+b)
  const TensorElement ea = tensor_exp({0.3}, 2);
  const TensorElement eb = tensor_exp({-1.1}, 2);
  const TensorElement eab = tensor_exp({0.3 - 1.1}, 2);
  CHECK(max_abs_diff(tensor_mul(ea, eb), eab) < 1e-15);
}

TEST_CASE("tensor product: exp(e1) exp(e2) level-2 entries", "[tensor]") {
  // pi_2(exp(e1) exp(e2)) = e1 (x) e1 / 2 + e1 (x) e2 + e2 (x) e2 / 2
  const TensorElement g = tensor_exp({1.0, 0.0}, 2);
  const TensorElement h = tensor_exp({0.0, 1.0}, 2);
  const TensorElement prod = tensor_mul(g, h);
  const auto& lvl2 = prod.at_level(2);
  CHECK(lvl2[word_to_index({1, 2}, 2)] == 1.0);
  CHECK(lvl2[word_to_index({2, 1}, 2)] == 0.0);
  CHECK(lvl2[word_to_index({1, 1}, 2)] == 0.5);
  CHECK(lvl2[word_to_index({2, 2}, 2)] == 0.5);
}

TEST_CASE("tensor product mismatch is rejected", "[tensor]") {
  CHECK_THROWS_AS(tensor_mul(tensor_unit(2, 3), tensor_unit(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(tensor_mul(tensor_unit(2, 3), tensor_unit(2, 2)), std::invalid_argument);
}

TEST_CASE("tensor associativity on random inputs", "[tensor]") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const TensorElement g = random_group_like(rng, 2, 4);
    const TensorElement h = random_group_like(rng, 2, 4);
    const TensorElement k = random_group_like(rng, 2, 4);
    CHECK(max_abs_diff(tensor_mul(tensor_mul(g, h), k), tensor_mul(g, tensor_mul(h, k))) < 1e-12);
  }
}

TEST_CASE("tensor inverse", "[tensor]") {
  const TensorElement unit = tensor_unit(2, 3);
  CHECK(max_abs_diff(tensor_inverse(unit), unit) == 0.0);

  // exp(v)^{-1} = exp(-v)
  const std::vector<double> v{0.4, -0.9};
  std::vector<double> neg{-0.4, 0.9};
  CHECK(max_abs_diff(tensor_inverse(tensor_exp(v, 4)), tensor_exp(neg, 4)) < 1e-14);

  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const TensorElement g = random_group_like(rng, 2, 4);
    CHECK(max_abs_diff(tensor_mul(g, tensor_inverse(g)), tensor_unit(2, 4)) < 1e-12);
  }

  TensorElement zero_scalar(2, 2);
  CHECK_THROWS_AS(tensor_inverse(zero_scalar), std::invalid_argument);
}

TEST_CASE("tensor exp and log", "[tensor]") {
  const TensorElement z = tensor_exp({0.0, 0.0}, 3);
  CHECK(max_abs_diff(z, tensor_unit(2, 3)) == 0.0);

  // d=1, v=2, N=3: levels 2^n / n! = (1, 2, 2, 4/3)
  const TensorElement e2 = tensor_exp({2.0}, 3);
  CHECK(e2.at_level(0)[0] == 1.0);
  CHECK(e2.at_level(1)[0] == 2.0);
  CHECK(e2.at_level(2)[0] == 2.0);
  CHECK(e2.at_level(3)[0] == Catch::Approx(4.0 / 3.0).epsilon(1e-15));

  // d=2, v = e1+e2, N=2: level-2 entry at (1,2) is 1/2
  const TensorElement e12 = tensor_exp({1.0, 1.0}, 2);
  CHECK(e12.at_level(2)[word_to_index({1, 2}, 2)] == 0.5);

  // exp/log round trip: log(exp(v)) is v at level 1 and zero above
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> v = random_vector(rng, 3);
    const TensorElement logexp = tensor_log(tensor_exp(v, 4));
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(std::abs(logexp.at_level(1)[i] - v[i]) < 1e-12);
    for (int n = 2; n <= 4; ++n)
      for (double entry : logexp.at_level(n)) CHECK(std::abs(entry) < 1e-12);
  }
  const TensorElement log1d = tensor_log(tensor_exp({1.7}, 4));
  CHECK(log1d.at_level(1)[0] == Catch::Approx(1.7).epsilon(1e-14));
  for (int n = 2; n <= 4; ++n) CHECK(std::abs(log1d.at_level(n)[0]) < 1e-14);

  TensorElement bad(2, 2);
  bad.at_level(0)[0] = 0.5;
  CHECK_THROWS_AS(tensor_log(bad), std::invalid_argument);
}

TEST_CASE("dilation commutes with the tensor product", "[tensor]") {
  std::mt19937 rng(19);
  const double lambda = 0.37;
  for (int trial = 0; trial < 10; ++trial) {
    const TensorElement g = random_group_like(rng, 2, 4);
    const TensorElement h = random_group_like(rng, 2, 4);
    CHECK(max_abs_diff(tensor_dilate(tensor_mul(g, h), lambda),
                       tensor_mul(tensor_dilate(g, lambda), tensor_dilate(h, lambda))) < 1e-12);
  }
}

TEST_CASE("homogeneous norm", "[tensor]") {
  CHECK(homogeneous_norm(tensor_unit(3, 4)) == 0.0);

  // exp(v) with |v| = 3 has homogeneous norm 3 at every truncation level
  std::vector<double> v{3.0 / std::sqrt(2.0), -3.0 / std::sqrt(2.0)};
  for (int level = 1; level <= 5; ++level)
    CHECK(homogeneous_norm(tensor_exp(v, level)) == Catch::Approx(3.0).epsilon(1e-12));

  // pure antisymmetric area a (e1 e2 - e2 e1): norm (2 a sqrt 2)^{1/2}
  const double a = 0.8;
  TensorElement area = tensor_unit(2, 2);
  area.at_level(2)[word_to_index({1, 2}, 2)] = a;
  area.at_level(2)[word_to_index({2, 1}, 2)] = -a;
  CHECK(homogeneous_norm(area) ==
        Catch::Approx(std::sqrt(2.0 * a * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("grid rho_pvar distance: basics", "[tensor]") {
  std::mt19937 rng(23);
  std::vector<TensorElement> xs, ys;
  for (int i = 0; i < 5; ++i) {
    const TensorElement g = tensor_exp(random_vector(rng, 2), 3);
    xs.push_back(g);
    ys.push_back(g);
  }
  CHECK(rho_pvar_distance(xs, ys, 3.2) == 0.0);

  // N=1 scalar paths differing by one jump of size eps on one cell
  const double eps = 0.25;
  std::vector<TensorElement> x1, y1;
  for (int i = 0; i < 4; ++i) {
    x1.push_back(tensor_exp({0.1 * (i + 1)}, 1));
    TensorElement h = x1.back();
    if (i == 2) h.at_level(1)[0] += eps;
    y1.push_back(h);
  }
  CHECK(rho_pvar_distance(x1, y1, 1.0) == Catch::Approx(eps).epsilon(1e-12));

  CHECK_THROWS_AS(rho_pvar_distance(xs, ys, 0.7), std::invalid_argument);
}

TEST_CASE("grid rho_pvar distance equals exhaustive enumeration", "[tensor]") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<TensorElement> xs, ys;
    for (int i = 0; i < 3; ++i) {  // 4-point grid: 3 cells, 2^2 sub-partitions per level
      xs.push_back(tensor_exp(random_vector(rng, 2), 2));
      ys.push_back(tensor_exp(random_vector(rng, 2), 2));
    }
    const double p = 2.3;
    CHECK(rho_pvar_distance(xs, ys, p) ==
          Catch::Approx(rho_pvar_bruteforce(xs, ys, p)).epsilon(1e-12));
  }
  // and on a 6-cell grid against the exhaustive oracle
  std::vector<TensorElement> xs, ys;
  for (int i = 0; i < 6; ++i) {
    xs.push_back(tensor_exp(random_vector(rng, 2), 3));
    ys.push_back(tensor_exp(random_vector(rng, 2), 3));
  }
  CHECK(rho_pvar_distance(xs, ys, 3.5) ==
        Catch::Approx(rho_pvar_bruteforce(xs, ys, 3.5)).epsilon(1e-12));
}

TEST_CASE("grid rho_pvar distance is a pseudo-metric", "[tensor]") {
  std::mt19937 rng(31);
  const double p = 3.4;  // p >= N keeps every level exponent p/n at least 1
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<TensorElement> xs, ys, zs;
    for (int i = 0; i < 4; ++i) {
      xs.push_back(tensor_exp(random_vector(rng, 2), 3));
      ys.push_back(tensor_exp(random_vector(rng, 2), 3));
      zs.push_back(tensor_exp(random_vector(rng, 2), 3));
    }
    const double dxy = rho_pvar_distance(xs, ys, p);
    const double dyx = rho_pvar_distance(ys, xs, p);
    CHECK(dxy == dyx);
    const double dxz = rho_pvar_distance(xs, zs, p);
    const double dyz = rho_pvar_distance(ys, zs, p);
    CHECK(dxz <= dxy + dyz + 1e-12);
  }
}

TEST_CASE("tensor csv serialization", "[tensor]") {
  CHECK(tensor_csv_header(2, 2) == "L0,L1_1,L1_2,L2_11,L2_12,L2_21,L2_22");
  const TensorElement g = tensor_exp({1.0, 2.0}, 2);
  std::ostringstream os;
  write_tensor_csv(os, g);
  CHECK(os.str() ==
        "L0,L1_1,L1_2,L2_11,L2_12,L2_21,L2_22\n"
        "1,1,2,0.5,1,1,2\n");
}

TEST_CASE("memory cap on d^N", "[tensor]") {
  CHECK_THROWS_AS(TensorElement(10, 8), std::invalid_argument);  // 10^8 > 1e7
  CHECK_NOTHROW(TensorElement(4, 5));
}
