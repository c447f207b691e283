#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "skpsa/rng.hpp"
#include "skpsa/samplers.hpp"

using namespace skpsa;

namespace {

// Reference for e^{-mu} I_k(mu): 50 terms of the ascending series, each
// evaluated in log space.  Accurate to well past 1e-12 for mu <= 20.
double bessel_scaled_series(int64_t k, double mu) {
  double sum = 0.0;
  const double lh = std::log(mu / 2.0);
  for (int j = 0; j < 50; ++j) {
    const double kj = static_cast<double>(k) + 2.0 * j;
    sum += std::exp(kj * lh - std::lgamma(j + 1.0) - std::lgamma(static_cast<double>(k + j) + 1.0) - mu);
  }
  return sum;
}

// Reference for the discretized Gaussian pmf: randomized rounding lands on k
// with triangular weight 1 - |y - k|, so P(k) is the integral of that weight
// against the N(0, nu) density.  Composite Simpson over [k-1, k+1].
double dg_pmf_quadrature(int64_t k, double nu) {
  const auto f = [&](double y) {
    const double w = 1.0 - std::abs(y - static_cast<double>(k));
    const double phi = std::exp(-y * y / (2.0 * nu)) / std::sqrt(2.0 * std::numbers::pi * nu);
    return w * phi;
  };
  const int panels = 8000;  // even
  const double a = static_cast<double>(k) - 1.0;
  const double h = 2.0 / panels;
  double acc = f(a) + f(a + 2.0);
  for (int i = 1; i < panels; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

std::vector<int64_t> draw_skellam(double mu, size_t n, uint64_t seed) {
  RandomStream rng(seed);
  const SkellamParams p(mu);
  std::vector<int64_t> xs(n);
  for (auto& x : xs) x = sample_skellam(p, rng);
  return xs;
}

double mean_of(const std::vector<int64_t>& xs) {
  double acc = 0.0;
  for (int64_t x : xs) acc += static_cast<double>(x);
  return acc / static_cast<double>(xs.size());
}

double var_of(const std::vector<int64_t>& xs) {
  const double m = mean_of(xs);
  double acc = 0.0;
  for (int64_t x : xs) acc += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
  return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST_CASE("scaled Bessel agrees with the ascending series") {
  for (const double mu : {0.5, 1.0, 5.0, 20.0}) {
    for (int64_t k = 0; k <= 20; ++k) {
      const double got = bessel_i_scaled(k, mu);
      const double want = bessel_scaled_series(k, mu);
      CHECK(std::abs(got - want) <= 1e-10 * want);
    }
  }
}

TEST_CASE("scaled Bessel frozen spot values") {
  CHECK(bessel_i_scaled(0, 1.0) == doctest::Approx(0.46575960759364043).epsilon(1e-12));
  CHECK(bessel_i_scaled(1, 1.0) == doctest::Approx(0.20791041534970845).epsilon(1e-12));
  CHECK(bessel_i_scaled(5, 20.0) == doctest::Approx(0.047444442493389080).epsilon(1e-12));
  CHECK(bessel_i_scaled(20, 20.0) == doctest::Approx(6.5725042913687707e-6).epsilon(1e-12));
  CHECK(bessel_i_scaled(3, 0.5) == doctest::Approx(0.0016043415075654608).epsilon(1e-12));
}

TEST_CASE("Bessel ratio sandwich") {
  // 1 > I_k/I_{k-1} > (-k + sqrt(k^2 + mu^2)) / mu for k >= 1.
  for (const double mu : {0.5, 1.0, 5.0, 20.0, 100.0}) {
    for (int64_t k = 1; k <= 40; ++k) {
      const double hi = bessel_i_scaled(k, mu);
      const double lo = bessel_i_scaled(k - 1, mu);
      if (hi == 0.0) continue;  // below the positive range of double
      const double ratio = hi / lo;
      const double kd = static_cast<double>(k);
      const double floor_bound = (-kd + std::sqrt(kd * kd + mu * mu)) / mu;
      CHECK(ratio < 1.0);
      CHECK(ratio > floor_bound);
    }
  }
}

TEST_CASE("Bessel deep orders flush to zero instead of misbehaving") {
  CHECK(bessel_i_scaled(1000, 0.5) == 0.0);
  const double v = bessel_i_scaled(150, 10.0);
  CHECK(v >= 0.0);
  CHECK(v < 1e-100);
}

TEST_CASE("Bessel input contract") {
  CHECK_THROWS_AS(bessel_i_scaled(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i_scaled(0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i_scaled(2000000, 1.0), std::invalid_argument);
}

TEST_CASE("Skellam log pmf is the log of the scaled Bessel value") {
  const SkellamParams p(2.0);
  for (int64_t k = -8; k <= 8; ++k) {
    const double direct = std::log(bessel_i_scaled(k < 0 ? -k : k, 2.0));
    CHECK(skellam_log_pmf(k, p) == doctest::Approx(direct).epsilon(1e-12));
  }
  // Deep tail stays finite and decreasing where the linear-space value is 0.
  const SkellamParams big(100.0);
  const double a = skellam_log_pmf(4000, big);
  const double b = skellam_log_pmf(5000, big);
  CHECK(std::isfinite(a));
  CHECK(b < a);
  CHECK(a < -700.0);
}

TEST_CASE("Poisson sampler matches its law in both regimes") {
  // mean 5 exercises CDF inversion, mean 50 the transformed rejection.
  for (const double mean : {5.0, 50.0}) {
    RandomStream rng(101);
    std::vector<int64_t> xs(100000);
    for (auto& x : xs) {
      x = sample_poisson(mean, rng);
      REQUIRE(x >= 0);
    }
    CHECK(std::abs(mean_of(xs) - mean) < 4.0 * std::sqrt(mean / 1e5));
    const double var_sd = std::sqrt((mean + 2.0 * mean * mean) / 1e5);
    CHECK(std::abs(var_of(xs) - mean) < 4.0 * var_sd);

    const GofResult g = goodness_of_fit(xs, [mean](int64_t k) {
      if (k < 0) return -1e9;
      return -mean + static_cast<double>(k) * std::log(mean) - std::lgamma(static_cast<double>(k) + 1.0);
    });
    CHECK(g.buckets >= 5);
    CHECK(g.p_value >= 0.001);
  }
  RandomStream dummy(0);
  CHECK_THROWS_AS(sample_poisson(0.0, dummy), std::invalid_argument);
  CHECK_THROWS_AS(sample_poisson(2e12, dummy), std::invalid_argument);
}

TEST_CASE("Skellam sampler: moments, symmetry, exact pmf") {
  const auto xs = draw_skellam(2.0, 100000, 7);
  CHECK(std::abs(mean_of(xs)) < 4.0 * std::sqrt(2.0 / 1e5));
  CHECK(std::abs(var_of(xs) - 2.0) < 4.0 * std::sqrt((2.0 + 8.0) / 1e5));

  int64_t pos = 0, neg = 0;
  for (int64_t x : xs) {
    if (x > 0) ++pos;
    if (x < 0) ++neg;
  }
  CHECK(std::abs(static_cast<double>(pos - neg)) < 4.0 * std::sqrt(static_cast<double>(pos + neg)));

  const SkellamParams p(2.0);
  const GofResult g = goodness_of_fit(xs, [&](int64_t k) { return skellam_log_pmf(k, p); });
  CHECK(g.p_value >= 0.001);
}

TEST_CASE("goodness of fit rejects the wrong law") {
  const auto xs = draw_skellam(2.0, 100000, 8);
  const SkellamParams wrong(3.0);
  const GofResult g = goodness_of_fit(xs, [&](int64_t k) { return skellam_log_pmf(k, wrong); });
  CHECK(g.p_value < 1e-6);
}

TEST_CASE("goodness of fit input contract") {
  const std::vector<int64_t> empty;
  CHECK_THROWS_AS(goodness_of_fit(empty, [](int64_t) { return -1.0; }), std::invalid_argument);
}

TEST_CASE("sums of Skellam draws reproduce the summed law") {
  RandomStream rng(2024);
  const SkellamParams part(0.5);
  std::vector<int64_t> sums(30000);
  for (auto& s : sums) {
    int64_t acc = 0;
    for (int i = 0; i < 10; ++i) acc += sample_skellam(part, rng);
    s = acc;
  }
  const SkellamParams whole(5.0);
  const GofResult g = goodness_of_fit(sums, [&](int64_t k) { return skellam_log_pmf(k, whole); });
  CHECK(g.p_value >= 0.001);
}

TEST_CASE("discretized Gaussian pmf agrees with quadrature") {
  for (const double nu : {0.25, 1.0, 4.0}) {
    for (int64_t k = -6; k <= 6; ++k) {
      const double got = discretized_gaussian_pmf(k, nu);
      const double want = dg_pmf_quadrature(k, nu);
      CHECK(std::abs(got - want) <= 1e-9 * want + 1e-13);
    }
  }
}

TEST_CASE("discretized Gaussian pmf frozen spot values") {
  CHECK(discretized_gaussian_pmf(0, 1.0) == doctest::Approx(0.36874638037250724).epsilon(1e-12));
  CHECK(discretized_gaussian_pmf(1, 1.0) == doctest::Approx(0.24080204184288972).epsilon(1e-12));
  CHECK(discretized_gaussian_pmf(0, 0.25) == doctest::Approx(0.60954842221539696).epsilon(1e-12));
  CHECK(discretized_gaussian_pmf(2, 4.0) == doctest::Approx(0.12094481997707612).epsilon(1e-12));
}

TEST_CASE("discretized Gaussian sampler: variance inflation and exact law") {
  RandomStream rng(31);
  const GaussianParams p(100.0);
  std::vector<int64_t> xs(100000);
  for (auto& x : xs) x = sample_discrete_gaussian(p, rng);

  // Rounding adds E[f(1-f)] to the variance, about 1/6 for wide Gaussians;
  // a 5-sigma band around nu + 1/6 stays honest and essentially never trips.
  const double target = 100.0 + 1.0 / 6.0;
  CHECK(std::abs(var_of(xs) - target) < 5.0 * std::sqrt(2.0 * target * target / 1e5));
  CHECK(std::abs(mean_of(xs)) < 4.0 * std::sqrt(target / 1e5));

  RandomStream rng2(32);
  const GaussianParams p2(4.0);
  std::vector<int64_t> ys(100000);
  for (auto& y : ys) y = sample_discrete_gaussian(p2, rng2);
  const GofResult g = goodness_of_fit(ys, [&](int64_t k) {
    const double v = discretized_gaussian_pmf(k, 4.0);
    return v > 0.0 ? std::log(v) : -1e9;
  });
  CHECK(g.p_value >= 0.001);
}

TEST_CASE("pmf tables carry nearly all mass inside their window") {
  const PmfTable sk = skellam_pmf_table(SkellamParams(20.0));
  CHECK(sk.k_min == -sk.k_max());
  CHECK(sk.truncated_mass >= 0.0);
  CHECK(sk.truncated_mass <= 1e-12);
  double mass = 0.0;
  for (double v : sk.p) mass += v;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sk.at(sk.k_min - 1) == 0.0);
  CHECK(sk.at(sk.k_max() + 1) == 0.0);
  CHECK(sk.at(3) == doctest::Approx(bessel_i_scaled(3, 20.0)).epsilon(1e-10));
  CHECK(sk.at(3) == doctest::Approx(sk.at(-3)).epsilon(1e-12));

  const PmfTable dg = discretized_gaussian_pmf_table(GaussianParams(4.0));
  double dg_mass = 0.0;
  for (double v : dg.p) dg_mass += v;
  CHECK(dg_mass >= 1.0 - 1e-11);
  CHECK(dg.at(1) == doctest::Approx(discretized_gaussian_pmf(1, 4.0)).epsilon(1e-12));
}

TEST_CASE("Skellam tail bound: frozen value and analytic ceiling") {
  const SkellamParams p(100.0);
  CHECK(skellam_tail_bound(9.0, p) == doctest::Approx(3.5508174355899949e-11).epsilon(1e-10));
  // exp(-s) e^{2/3} dominates the bound whenever mu = 2 s.
  for (const double s : {4.0, 9.0, 16.0, 25.0}) {
    const double bound = skellam_tail_bound(s, SkellamParams(2.0 * s));
    CHECK(bound <= std::exp(-s) * std::exp(2.0 / 3.0));
  }
  CHECK_THROWS_AS(skellam_tail_bound(100.0, p), std::invalid_argument);
  CHECK_THROWS_AS(skellam_tail_bound(0.0, p), std::invalid_argument);
}

TEST_CASE("Gaussian sum tail bound formula") {
  CHECK(gaussian_sum_tail_bound(1, 100.0, 4.0) == doctest::Approx(0.27608379914931369).epsilon(1e-12));
  // Monotone decreasing in s.
  CHECK(gaussian_sum_tail_bound(1, 1.0, 9.0) < gaussian_sum_tail_bound(1, 1.0, 4.0));
}

TEST_CASE("chi-square tail and regularized gamma against reference values") {
  CHECK(chi_square_tail(10.0, 5) == doctest::Approx(0.07523524614651217).epsilon(1e-10));
  CHECK(chi_square_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_tail(100.0, 80) == doctest::Approx(0.064570368921133).epsilon(1e-10));
  CHECK(regularized_gamma_q(0.5, 0.5) == doctest::Approx(0.31731050786291115).epsilon(1e-10));
  CHECK(regularized_gamma_q(2.5, 3.0) == doctest::Approx(0.30621891841327875).epsilon(1e-10));
  CHECK(regularized_gamma_q(10.0, 3.0) == doctest::Approx(0.9988975118698845).epsilon(1e-10));
  CHECK(regularized_gamma_q(2.0, 0.0) == doctest::Approx(1.0));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
}

TEST_CASE("Mann-Whitney one-sided p with midranks and ties") {
  const std::vector<double> a{3.1, 0.2, 5.5, 2.2, 4.0};
  const std::vector<double> b{1.0, 0.1, 2.0, 2.2, 0.5};
  CHECK(mann_whitney_p_greater(a, b) == doctest::Approx(0.05803697165495004).epsilon(1e-10));
  CHECK(mann_whitney_p_greater(b, a) > 0.5);

  const std::vector<double> flat{1.0, 1.0, 1.0};
  CHECK(mann_whitney_p_greater(flat, flat) == 0.5);  // zero variance falls back
}

TEST_CASE("parameter structs validate") {
  CHECK_THROWS_AS(SkellamParams(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SkellamParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianParams(0.0), std::invalid_argument);
  CHECK(GaussianParams(1.0).alpha(Modulus(23)) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi) / 23.0));
  CHECK_THROWS_AS(GaussianParams(1e6).alpha(Modulus(23)), std::domain_error);
}

TEST_CASE("samplers are reproducible per seed") {
  RandomStream a(5), b(5), c(6);
  const SkellamParams p(7.0);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 200; ++i) {
    const int64_t va = sample_skellam(p, a);
    all_equal = all_equal && va == sample_skellam(p, b);
    any_diff = any_diff || va != sample_skellam(p, c);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}
