#include "skpsa/dp.hpp"

#include <cmath>
#include <stdexcept>

namespace skpsa {

DpBudget::DpBudget(double epsilon_, double delta_) : epsilon(epsilon_), delta(delta_) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("DpBudget: epsilon must be positive");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("DpBudget: delta must lie in (0,1)");
}

QuerySpec sum_query(int64_t per_user_bound, int64_t num_users, int64_t num_queries) {
  if (per_user_bound < 1 || num_users < 1 || num_queries < 1)
    throw std::invalid_argument("sum_query: all counts must be positive");
  return QuerySpec{static_cast<double>(per_user_bound), per_user_bound, num_users, num_queries};
}

double min_skellam_variance(const DpBudget& b, double sensitivity) {
  if (!(sensitivity > 0.0)) throw std::invalid_argument("min_skellam_variance: sensitivity must be positive");
  const double x = b.epsilon / sensitivity;
  double denom;
  if (x < 1e-4) {
    const double x2 = x * x;
    denom = x2 / 2.0 + x2 * x2 / 8.0 + x2 * x2 * x2 / 144.0;
  } else {
    denom = 1.0 - std::cosh(x) + x * std::sinh(x);
  }
  return std::log(1.0 / b.delta) / denom;
}

double simple_variance_bound(const DpBudget& b, double sensitivity) {
  if (!(sensitivity > 0.0)) throw std::invalid_argument("simple_variance_bound: sensitivity must be positive");
  const double r = sensitivity / b.epsilon;
  return 2.0 * r * r * std::log(1.0 / b.delta);
}

double accuracy_alpha(const DpBudget& b, double beta, double sensitivity) {
  if (!(beta > 0.0) || !(beta < 1.0)) throw std::invalid_argument("accuracy_alpha: beta must lie in (0,1)");
  if (!(sensitivity > 0.0)) throw std::invalid_argument("accuracy_alpha: sensitivity must be positive");
  return sensitivity / b.epsilon * (std::log(2.0 / beta) + std::log(1.0 / b.delta));
}

DpBudget compose_per_query(const DpBudget& b, int64_t lambda) {
  if (lambda < 1) throw std::invalid_argument("compose_per_query: lambda must be positive");
  return DpBudget(b.epsilon / static_cast<double>(lambda), b.delta);
}

double epsilon_cap(int64_t kappa, const QuerySpec& spec, double delta) {
  if (kappa < 1) throw std::invalid_argument("epsilon_cap: kappa must be positive");
  if (!(delta > 0.0) || !(delta < 1.0)) throw std::invalid_argument("epsilon_cap: delta must lie in (0,1)");
  const double m = static_cast<double>(spec.per_user_bound);
  return std::sqrt(2.0 * m * m * std::log(1.0 / delta) /
                   (static_cast<double>(kappa) * static_cast<double>(spec.num_users)));
}

ParameterPlan plan_parameters(int64_t kappa, const QuerySpec& spec, const DpBudget& b, double beta) {
  if (kappa < 1) throw std::invalid_argument("plan_parameters: kappa must be positive");
  const double m = static_cast<double>(spec.per_user_bound);
  const double n = static_cast<double>(spec.num_users);
  const double lambda = static_cast<double>(spec.num_queries);

  const DpBudget per_query = compose_per_query(b, spec.num_queries);
  const double mu_total = simple_variance_bound(per_query, m);
  const double mu_user = mu_total / n;
  const bool security_ok = mu_total >= n * lambda * lambda * static_cast<double>(kappa);

  // 50-sigma headroom: |sum of inputs| <= n m and the total Skellam noise
  // exceeds 50 sqrt(mu_total) only with negligible probability.
  const double sigma_margin = std::ceil(50.0 * std::sqrt(mu_total));
  const double q_seed_check = 2.0 * (n * m + sigma_margin) + 1.0;
  if (!(q_seed_check < 4.6e18)) throw std::overflow_error("plan_parameters: modulus out of 62-bit range");
  const uint64_t q_seed = 2 * (static_cast<uint64_t>(spec.num_users) * static_cast<uint64_t>(spec.per_user_bound) +
                               static_cast<uint64_t>(sigma_margin)) + 1;
  const Modulus q(next_prime(q_seed));

  ParameterPlan plan{
      mu_total,
      mu_user,
      kappa,
      q,
      epsilon_cap(kappa, spec, b.delta),
      security_ok,
      accuracy_alpha(per_query, beta, m),
      2.0 * std::sqrt(mu_total) / static_cast<double>(q.value()),
      lambda > n * n,
  };
  return plan;
}

}  // namespace skpsa
