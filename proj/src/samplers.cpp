#include "skpsa/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace skpsa {

namespace {

constexpr double kPoissonMeanLimit = 1e12;

}  // namespace

SkellamParams::SkellamParams(double mu_) : mu(mu_) {
  if (!(mu > 0.0) || !(mu < 2.0 * kPoissonMeanLimit))
    throw std::invalid_argument("SkellamParams: mu must be positive and finite");
}

GaussianParams::GaussianParams(double nu_) : nu(nu_) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("GaussianParams: nu must be positive and finite");
}

double GaussianParams::alpha(const Modulus& q) const {
  double a = std::sqrt(2.0 * std::numbers::pi * nu) / static_cast<double>(q.value());
  if (!(a > 0.0) || !(a < 1.0))
    throw std::domain_error("GaussianParams::alpha: width not in (0,1) for this modulus");
  return a;
}

namespace {

// CDF inversion, one uniform per draw.  Stable for mean <= 30: the smallest
// pmf value touched is e^-30, far above double underflow.  The loop cap only
// fires for uniforms inside the last ~1e-50 of the CDF.
int64_t poisson_inversion(double mean, RandomStream& rng) {
  const double u = rng.next_double();
  double p = std::exp(-mean);
  double cdf = p;
  int64_t k = 0;
  const int64_t cap = static_cast<int64_t>(mean + 60.0 * std::sqrt(mean) + 40.0);
  while (u > cdf && k < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Transformed rejection with squeeze (Hoermann's PTRS).  Exact: the final
// acceptance test evaluates the true pmf through lgamma.  Valid for
// mean >= 10; this file uses it above 30.
int64_t poisson_ptrs(double mean, RandomStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double_pos();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * loglam - mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<int64_t>(kf);
  }
}

}  // namespace

int64_t sample_poisson(double mean, RandomStream& rng) {
  if (!(mean > 0.0) || !(mean < kPoissonMeanLimit))
    throw std::invalid_argument("sample_poisson: mean out of (0, 1e12)");
  return mean <= 30.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

int64_t sample_skellam(const SkellamParams& p, RandomStream& rng) {
  const double half = p.mu / 2.0;
  return sample_poisson(half, rng) - sample_poisson(half, rng);
}

int64_t sample_discrete_gaussian(const GaussianParams& p, RandomStream& rng) {
  // Box-Muller, cosine branch only, so every call consumes exactly two
  // uniforms for the Gaussian plus one for the rounding.
  const double u1 = rng.next_double_pos();
  const double u2 = rng.next_double();
  const double y = std::sqrt(p.nu) * std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  const double fl = std::floor(y);
  const double frac = y - fl;
  int64_t base = static_cast<int64_t>(fl);
  return base + (rng.next_double() < frac ? 1 : 0);
}

namespace {

// Backward recurrence for the ratios r_j = I_j(mu)/I_{j-1}(mu), seeded with
// r = 0 well above both the target order and the turning point j ~ sqrt(mu),
// where the contamination by the dominant solution dies off like
// exp(-(M^2 - k^2)/mu).  A start pad of 10*sqrt(mu) leaves relative errors
// near 1e-14.  The Horner accumulator T_j = (sum_{i>=j} v_i)/v_j turns the
// same sweep into the normalizer S = 1 + 2*sum_{k>=1} I_k/I_0, which equals
// e^mu / I_0(mu) by the Bessel generating identity, so no value in the sweep
// can overflow: S <= ~sqrt(2*pi*mu) + 1.
//
// One sweep yields, in O(M) time and O(1) or O(K) memory:
//   log v_k   (log of I_k/I_0, accumulated for one requested k), and
//   S         (normalizer; e^-mu I_k(mu) = v_k / S).
struct BesselSweep {
  double log_vk = 0.0;
  double S = 1.0;
};

int64_t sweep_start(int64_t k, double mu) {
  return k + static_cast<int64_t>(std::ceil(10.0 * std::sqrt(mu + 1.0))) + 64;
}

BesselSweep bessel_sweep(int64_t k, double mu) {
  const int64_t M = sweep_start(k, mu);
  double r_next = 0.0;
  double t = 1.0;
  double log_vk = 0.0;
  for (int64_t j = M; j >= 1; --j) {
    const double r = 1.0 / (2.0 * static_cast<double>(j) / mu + r_next);
    t = 1.0 + r * t;
    if (j <= k) log_vk += std::log(r);
    r_next = r;
  }
  return BesselSweep{log_vk, 2.0 * t - 1.0};
}

// Same sweep but storing the ratios r_1..r_K for table construction.
double ratio_sweep(double mu, int64_t K, std::vector<double>& ratios) {
  const int64_t M = sweep_start(K, mu);
  ratios.assign(static_cast<size_t>(K) + 1, 0.0);
  double r_next = 0.0;
  double t = 1.0;
  for (int64_t j = M; j >= 1; --j) {
    const double r = 1.0 / (2.0 * static_cast<double>(j) / mu + r_next);
    t = 1.0 + r * t;
    if (j <= K) ratios[static_cast<size_t>(j)] = r;
    r_next = r;
  }
  return 2.0 * t - 1.0;  // S
}

}  // namespace

double bessel_i_scaled(int64_t k, double mu) {
  if (k < 0 || k > 1000000) throw std::invalid_argument("bessel_i_scaled: k out of [0, 1e6]");
  if (!(mu >= 0.0) || !(mu <= 1e12)) throw std::invalid_argument("bessel_i_scaled: mu out of [0, 1e12]");
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  const BesselSweep s = bessel_sweep(k, mu);
  const double v = std::exp(s.log_vk - std::log(s.S));
  return v < 1e-300 ? 0.0 : v;
}

double skellam_log_pmf(int64_t k, const SkellamParams& p) {
  int64_t a = k < 0 ? -k : k;
  if (a > 100000000) throw std::invalid_argument("skellam_log_pmf: |k| out of range");
  const BesselSweep s = bessel_sweep(a, p.mu);
  return s.log_vk - std::log(s.S);
}

double skellam_tail_bound(double s, const SkellamParams& p) {
  if (!(s > 0.0) || !(p.mu > s))
    throw std::invalid_argument("skellam_tail_bound: requires mu > s > 0");
  const double t = std::asinh(1.0 / std::sqrt(s));
  return std::exp(-p.mu * (1.0 - std::cosh(t)) - t * s * std::sqrt(p.mu));
}

double gaussian_sum_tail_bound(int64_t zeta, double nu, double s) {
  if (zeta < 1 || !(nu > 0.0) || !(s > 0.0))
    throw std::invalid_argument("gaussian_sum_tail_bound: bad arguments");
  // The threshold sqrt(zeta*nu*s) scales with zeta; after normalizing by the
  // sub-gaussian parameter sqrt(zeta*(nu+1)) the exponent loses zeta.
  return 2.0 * std::exp(-0.5 * s * nu / (nu + 1.0));
}

PmfTable skellam_pmf_table(const SkellamParams& p, double tail_mass) {
  if (!(tail_mass > 0.0) || !(tail_mass < 1.0))
    throw std::invalid_argument("skellam_pmf_table: tail_mass out of (0,1)");
  int64_t K = static_cast<int64_t>(std::ceil(8.5 * (std::sqrt(p.mu) + 1.0))) + 8;
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<double> ratios;
    const double S = ratio_sweep(p.mu, K, ratios);
    std::vector<double> half(static_cast<size_t>(K) + 1);
    half[0] = 1.0 / S;
    for (int64_t j = 1; j <= K; ++j)
      half[static_cast<size_t>(j)] = half[static_cast<size_t>(j - 1)] * ratios[static_cast<size_t>(j)];
    double mass = half[0];
    for (int64_t j = 1; j <= K; ++j) mass += 2.0 * half[static_cast<size_t>(j)];
    if (mass >= 1.0 - tail_mass) {
      PmfTable t;
      t.k_min = -K;
      t.p.resize(static_cast<size_t>(2 * K + 1));
      for (int64_t j = -K; j <= K; ++j)
        t.p[static_cast<size_t>(j + K)] = half[static_cast<size_t>(j < 0 ? -j : j)];
      t.truncated_mass = std::max(0.0, 1.0 - mass);
      return t;
    }
    K *= 2;
  }
  throw std::runtime_error("skellam_pmf_table: window did not capture the requested mass");
}

namespace {

double norm_cdf_sigma(double x, double sigma) {
  return 0.5 * (1.0 + std::erf(x / (sigma * std::numbers::sqrt2)));
}

double norm_pdf_sigma(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double discretized_gaussian_pmf(int64_t k, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("discretized_gaussian_pmf: nu must be positive");
  // P(k) = integral of the N(0, nu) density against the unit triangular
  // kernel centered at k; both pieces reduce to erf and density terms via
  // int y phi(y) dy = nu (phi(a) - phi(b)).
  const double sigma = std::sqrt(nu);
  const double km1 = static_cast<double>(k) - 1.0;
  const double k0 = static_cast<double>(k);
  const double kp1 = static_cast<double>(k) + 1.0;
  const double left = nu * (norm_pdf_sigma(km1, sigma) - norm_pdf_sigma(k0, sigma)) -
                      km1 * (norm_cdf_sigma(k0, sigma) - norm_cdf_sigma(km1, sigma));
  const double right = kp1 * (norm_cdf_sigma(kp1, sigma) - norm_cdf_sigma(k0, sigma)) -
                       nu * (norm_pdf_sigma(k0, sigma) - norm_pdf_sigma(kp1, sigma));
  return std::max(0.0, left + right);
}

PmfTable discretized_gaussian_pmf_table(const GaussianParams& p, double tail_mass) {
  if (!(tail_mass > 0.0) || !(tail_mass < 1.0))
    throw std::invalid_argument("discretized_gaussian_pmf_table: tail_mass out of (0,1)");
  int64_t K = static_cast<int64_t>(std::ceil(8.5 * (std::sqrt(p.nu) + 1.0))) + 4;
  for (int attempt = 0; attempt < 4; ++attempt) {
    PmfTable t;
    t.k_min = -K;
    t.p.resize(static_cast<size_t>(2 * K + 1));
    double mass = 0.0;
    for (int64_t j = -K; j <= K; ++j) {
      const double v = discretized_gaussian_pmf(j, p.nu);
      t.p[static_cast<size_t>(j + K)] = v;
      mass += v;
    }
    if (mass >= 1.0 - tail_mass) {
      t.truncated_mass = std::max(0.0, 1.0 - mass);
      return t;
    }
    K *= 2;
  }
  throw std::runtime_error("discretized_gaussian_pmf_table: window did not capture the requested mass");
}

namespace {

// Regularized incomplete gamma by series (x < a+1) or continued fraction
// (x >= a+1); both converge to ~1e-15 for the df range reached by the
// chi-square tests in this library.
double gamma_q_series_p(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 2000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 2000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_q_series_p(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_tail(double statistic, double df) {
  if (!(df > 0.0) || statistic < 0.0) throw std::invalid_argument("chi_square_tail: bad arguments");
  return regularized_gamma_q(df / 2.0, statistic / 2.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

GofResult goodness_of_fit(std::span<const int64_t> samples,
                          const std::function<double(int64_t)>& log_pmf) {
  if (samples.empty()) throw std::invalid_argument("goodness_of_fit: no samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  int64_t lo = *lo_it;
  int64_t hi = *hi_it;

  // Extend the window until the reference density is negligible on both
  // sides, so nearly all model mass is represented by explicit cells.
  constexpr double kEdgeLog = -41.0;  // e^-41 ~ 1.6e-18 per cell
  constexpr int64_t kMaxWidth = 10000000;
  while (log_pmf(lo - 1) > kEdgeLog && hi - lo < kMaxWidth) --lo;
  while (log_pmf(hi + 1) > kEdgeLog && hi - lo < kMaxWidth) ++hi;

  const size_t width = static_cast<size_t>(hi - lo + 1);
  std::vector<double> expected(width, 0.0);
  std::vector<int64_t> observed(width, 0);
  const double n = static_cast<double>(samples.size());
  double model_mass = 0.0;
  for (size_t i = 0; i < width; ++i) {
    const double p = std::exp(log_pmf(lo + static_cast<int64_t>(i)));
    expected[i] = n * p;
    model_mass += p;
  }
  // Residual mass outside the window is split across the two edge cells; it
  // is bounded by the table truncation and never shifts a pooled bucket.
  const double leftover = n * std::max(0.0, 1.0 - model_mass);
  expected.front() += leftover / 2.0;
  expected.back() += leftover / 2.0;
  for (int64_t s : samples) observed[static_cast<size_t>(s - lo)] += 1;

  // Pool cells left to right until each bucket expects at least 5; a final
  // underweight remainder merges into the previous bucket.
  std::vector<double> bucket_exp;
  std::vector<double> bucket_obs;
  double acc_e = 0.0, acc_o = 0.0;
  for (size_t i = 0; i < width; ++i) {
    acc_e += expected[i];
    acc_o += static_cast<double>(observed[i]);
    if (acc_e >= 5.0) {
      bucket_exp.push_back(acc_e);
      bucket_obs.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (bucket_exp.empty()) {
      bucket_exp.push_back(acc_e);
      bucket_obs.push_back(acc_o);
    } else {
      bucket_exp.back() += acc_e;
      bucket_obs.back() += acc_o;
    }
  }
  if (bucket_exp.size() < 2)
    throw std::invalid_argument("goodness_of_fit: degenerate test, fewer than 2 buckets");

  GofResult r;
  r.buckets = bucket_exp.size();
  for (size_t i = 0; i < bucket_exp.size(); ++i) {
    const double d = bucket_obs[i] - bucket_exp[i];
    r.statistic += d * d / bucket_exp[i];
  }
  r.df = static_cast<int64_t>(bucket_exp.size()) - 1;
  r.p_value = chi_square_tail(r.statistic, static_cast<double>(r.df));
  return r;
}

double mann_whitney_p_greater(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_p_greater: empty sample");
  const size_t na = a.size(), nb = b.size();
  struct Tagged {
    double v;
    bool from_a;
  };
  std::vector<Tagged> all;
  all.reserve(na + nb);
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) { return x.v < y.v; });

  const double n = static_cast<double>(na + nb);
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (all[k].from_a) rank_sum_a += midrank;
    tie_term += t * t * t - t;
    i = j;
  }
  const double u_a = rank_sum_a - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
  const double mean_u = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  const double var_u = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var_u <= 0.0) return 0.5;  // every observation tied
  const double z = (u_a - mean_u - 0.5) / std::sqrt(var_u);
  return 1.0 - normal_cdf(z);
}

}  // namespace skpsa
