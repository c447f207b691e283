#pragma once

// Exact integer samplers (Poisson, symmetric Skellam, discretized Gaussian),
// scaled Bessel evaluation, closed-form tail bounds, and the statistical
// test helpers used by the distribution checks.
//
// Exactness contract: every sampler follows its target law up to double
// rounding, with no normal or other limiting approximation anywhere.  All
// randomness comes from the caller's RandomStream, and each routine consumes
// a deterministic (data-dependent only through rejection) number of draws.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "skpsa/ring.hpp"
#include "skpsa/rng.hpp"

namespace skpsa {

// Symmetric Skellam Sk_mu: difference of two independent Poisson(mu/2).
// Mean 0, variance mu; pmf(k) = e^-mu I_k(mu).
struct SkellamParams {
  double mu;
  explicit SkellamParams(double mu_);
};

// Discretized Gaussian D_nu: a continuous N(0, nu) draw, randomly rounded to
// an adjacent integer with probability equal to its fractional part.  The
// rounding adds at most 1/6 to the variance.
struct GaussianParams {
  double nu;
  explicit GaussianParams(double nu_);
  // Width relative to a modulus, sqrt(2*pi*nu)/q; must land in (0,1) for the
  // parameter sets this library works with.
  double alpha(const Modulus& q) const;
};

// Exact Poisson: sequential CDF inversion for mean <= 30, transformed
// rejection (PTRS) with lgamma-exact acceptance for larger means.
// Requires 0 < mean < 10^12.
int64_t sample_poisson(double mean, RandomStream& rng);

int64_t sample_skellam(const SkellamParams& p, RandomStream& rng);
int64_t sample_discrete_gaussian(const GaussianParams& p, RandomStream& rng);

// e^-mu I_k(mu) for 0 <= k <= 10^6, 0 <= mu <= 10^12, relative accuracy
// 1e-10 or better; values below 1e-300 flush to exact 0.
double bessel_i_scaled(int64_t k, double mu);

// ln(e^-mu I_|k|(mu)), computed in log space so deep-tail orders do not
// underflow.  |k| <= 10^8.
double skellam_log_pmf(int64_t k, const SkellamParams& p);

// Tail bound Pr[X > s*sqrt(mu)] <= exp(-mu(1-cosh t) - t*s*sqrt(mu)) at
// t = arsinh(1/sqrt(s)), valid for mu > s > 0.
double skellam_tail_bound(double s, const SkellamParams& p);

// Hoeffding bound on Pr[|sum of zeta D_nu draws| > sqrt(zeta*nu*s)] with the
// rounding-inclusive sub-gaussian parameter sqrt(nu+1):
//   2 * exp(-(s/2) * nu/(nu+1)).
double gaussian_sum_tail_bound(int64_t zeta, double nu, double s);

// Tabulated pmf over a finite symmetric-ish window, extended until the
// retained mass reaches 1 - tail_mass.  Lookups outside the window return 0.
struct PmfTable {
  int64_t k_min = 0;
  std::vector<double> p;
  double truncated_mass = 0.0;

  int64_t k_max() const { return k_min + static_cast<int64_t>(p.size()) - 1; }
  double at(int64_t k) const {
    if (k < k_min || k > k_max()) return 0.0;
    return p[static_cast<size_t>(k - k_min)];
  }
};

PmfTable skellam_pmf_table(const SkellamParams& p, double tail_mass = 1e-12);

// Exact pmf of D_nu: integral of the N(0, nu) density against the triangular
// rounding kernel, in closed form through erf.
double discretized_gaussian_pmf(int64_t k, double nu);
PmfTable discretized_gaussian_pmf_table(const GaussianParams& p, double tail_mass = 1e-12);

// Pearson chi-square against a discrete reference density, with buckets
// pooled outward so every expected count is at least 5.
struct GofResult {
  double statistic = 0.0;
  int64_t df = 0;
  double p_value = 1.0;
  size_t buckets = 0;
};

GofResult goodness_of_fit(std::span<const int64_t> samples,
                          const std::function<double(int64_t)>& log_pmf);

// Regularized upper incomplete gamma Q(a, x); p-value of a chi-square
// statistic with df degrees of freedom is chi_square_tail(stat, df).
double regularized_gamma_q(double a, double x);
double chi_square_tail(double statistic, double df);

// Standard normal CDF.
double normal_cdf(double z);

// One-sided Mann-Whitney p-value for "a is stochastically greater than b",
// normal approximation with midranks and tie-corrected variance.
double mann_whitney_p_greater(std::span<const double> a, std::span<const double> b);

}  // namespace skpsa
