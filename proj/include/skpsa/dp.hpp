#pragma once

// Differential-privacy accountant and parameter planner for Skellam-noised
// sum aggregation.  All logarithms are natural.

#include <cstdint>

#include "skpsa/ring.hpp"

namespace skpsa {

struct DpBudget {
  double epsilon;
  double delta;
  DpBudget(double epsilon_, double delta_);
};

struct QuerySpec {
  double sensitivity;       // L1 sensitivity of one query
  int64_t per_user_bound;   // m: per-user contribution lies in [-m, m]
  int64_t num_users;        // n
  int64_t num_queries;      // lambda
};

// Sum queries have sensitivity exactly m.
QuerySpec sum_query(int64_t per_user_bound, int64_t num_users, int64_t num_queries);

// Smallest Skellam variance mu such that Sk_mu noise gives (epsilon,
// delta)-DP for a sensitivity-S query:
//   mu >= ln(1/delta) / (1 - cosh(eps/S) + (eps/S) sinh(eps/S)).
// The denominator is evaluated by series (x^2/2 + x^4/8 + x^6/144) below
// x = 1e-4, where the closed form loses all significant digits.
double min_skellam_variance(const DpBudget& b, double sensitivity);

// The looser closed form 2 (S/eps)^2 ln(1/delta); an upper bound for
// min_skellam_variance on its whole domain.
double simple_variance_bound(const DpBudget& b, double sensitivity);

// Single-query accuracy: |noise| <= alpha except with probability beta,
// alpha = (S/eps) (ln(2/beta) + ln(1/delta)).
double accuracy_alpha(const DpBudget& b, double beta, double sensitivity);

// Basic composition across lambda queries: each query runs at epsilon/lambda
// with unchanged delta.
DpBudget compose_per_query(const DpBudget& b, int64_t lambda);

// Largest epsilon for which the joint security/privacy constraint can hold
// at dimension kappa: sqrt(2 m^2 ln(1/delta) / (kappa n)).
double epsilon_cap(int64_t kappa, const QuerySpec& spec, double delta);

struct ParameterPlan {
  double mu_total;          // total Skellam variance per query, all users
  double mu_user;           // per-user share, mu_total / n
  int64_t kappa;
  Modulus q;
  double eps_cap;
  bool security_ok;         // mu_total >= n lambda^2 kappa
  double alpha_single_query;
  double rho;               // noise-to-modulus ratio 2 sqrt(mu_total) / q
  bool lambda_warning;      // lambda > n^2: composition is the binding loss
};

// End-to-end planner: total noise from the composed budget, per-user share,
// security feasibility, and a modulus with 50-sigma wrap headroom:
//   q = next_prime(2 (n m + ceil(50 sqrt(mu_total))) + 1).
ParameterPlan plan_parameters(int64_t kappa, const QuerySpec& spec, const DpBudget& b, double beta);

}  // namespace skpsa
