#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "skpsa/dp.hpp"

using namespace skpsa;

TEST_CASE("minimal Skellam variance: closed form and series regime") {
  CHECK(min_skellam_variance(DpBudget(1.0, 0.1), 1.0) ==
        doctest::Approx(3.6426359827011225).epsilon(1e-12));
  // At eps/S = 1e-6 the closed-form denominator cancels to noise; the series
  // path must still land on the high-precision reference.
  CHECK(min_skellam_variance(DpBudget(1e-6, 0.1), 1.0) ==
        doctest::Approx(4605170185986.9401).epsilon(1e-9));
  // Scaling in the sensitivity: only eps/S matters.
  CHECK(min_skellam_variance(DpBudget(2.0, 0.1), 2.0) ==
        doctest::Approx(min_skellam_variance(DpBudget(1.0, 0.1), 1.0)).epsilon(1e-12));
}

TEST_CASE("minimal variance sits strictly below the simple bound on a grid") {
  for (const double eps : {0.25, 0.5, 1.0, 2.0}) {
    for (const double delta : {0.3, 0.1, 0.01, 0.001}) {
      const DpBudget b(eps, delta);
      CHECK(min_skellam_variance(b, 1.0) < simple_variance_bound(b, 1.0));
    }
  }
  CHECK(simple_variance_bound(DpBudget(1.0, 0.1), 1.0) ==
        doctest::Approx(2.0 * std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("single-query accuracy") {
  CHECK(accuracy_alpha(DpBudget(1.0, 0.1), 0.05, 1000.0) ==
        doctest::Approx(5991.464547107983).epsilon(1e-12));
  CHECK_THROWS_AS(accuracy_alpha(DpBudget(1.0, 0.1), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(accuracy_alpha(DpBudget(1.0, 0.1), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("composition splits epsilon and keeps delta") {
  const DpBudget per = compose_per_query(DpBudget(1.0, 0.1), 4);
  CHECK(per.epsilon == doctest::Approx(0.25));
  CHECK(per.delta == doctest::Approx(0.1));
  CHECK_THROWS_AS(compose_per_query(DpBudget(1.0, 0.1), 0), std::invalid_argument);
}

TEST_CASE("epsilon cap at the headline parameters") {
  const QuerySpec spec = sum_query(1000, 20000, 1);
  CHECK(epsilon_cap(200, spec, 0.1) == doctest::Approx(1.0729830131446736).epsilon(1e-12));
  CHECK(epsilon_cap(400, spec, 0.1) == doctest::Approx(0.7587135646925732).epsilon(1e-12));
}

TEST_CASE("planner: headline configuration is feasible") {
  const ParameterPlan plan = plan_parameters(200, sum_query(1000, 20000, 1), DpBudget(1.0, 0.1), 0.05);
  CHECK(plan.security_ok);
  CHECK(plan.q.value() == 40214609);
  CHECK(plan.mu_total == doctest::Approx(4605170.185988092).epsilon(1e-12));
  CHECK(plan.mu_user == doctest::Approx(230.25850929940458).epsilon(1e-12));
  CHECK(plan.eps_cap == doctest::Approx(1.0729830131446736).epsilon(1e-12));
  CHECK(plan.alpha_single_query == doctest::Approx(5991.464547107983).epsilon(1e-12));
  CHECK_FALSE(plan.lambda_warning);

  // Same budget, doubled dimension: the cap drops below eps = 1.
  CHECK_FALSE(plan_parameters(400, sum_query(1000, 20000, 1), DpBudget(1.0, 0.1), 0.05).security_ok);
}

TEST_CASE("planner: tiny configuration, frozen end to end") {
  const ParameterPlan plan = plan_parameters(2, sum_query(1, 10, 1), DpBudget(1.0, 0.1), 0.05);
  CHECK(plan.q.value() == 239);
  CHECK(plan.mu_total == doctest::Approx(4.6051701859880918).epsilon(1e-12));
  CHECK(plan.mu_user == doctest::Approx(0.46051701859880917).epsilon(1e-12));
  CHECK(plan.rho == doctest::Approx(0.017957874696981985).epsilon(1e-12));
  // mu_total = 4.6 falls short of n lambda^2 kappa = 20.
  CHECK_FALSE(plan.security_ok);
}

TEST_CASE("planner invariants across a parameter sweep") {
  for (const int64_t n : {int64_t(5), int64_t(50)}) {
    for (const int64_t lambda : {int64_t(1), int64_t(8)}) {
      const ParameterPlan plan =
          plan_parameters(4, sum_query(10, n, lambda), DpBudget(0.5, 0.05), 0.1);
      CHECK(plan.mu_user == doctest::Approx(plan.mu_total / static_cast<double>(n)));
      CHECK(plan.security_ok ==
            (plan.mu_total >= static_cast<double>(n) * static_cast<double>(lambda) *
                                  static_cast<double>(lambda) * 4.0));
      // Modulus leaves 50 sigma of wrap headroom beyond the data range.
      const double margin = 50.0 * std::sqrt(plan.mu_total);
      CHECK(static_cast<double>(plan.q.value()) >
            2.0 * (static_cast<double>(n) * 10.0 + margin));
      CHECK(plan.rho == doctest::Approx(2.0 * std::sqrt(plan.mu_total) /
                                        static_cast<double>(plan.q.value())));
    }
  }
}

TEST_CASE("composition dominates privacy when lambda outgrows n^2") {
  CHECK(plan_parameters(2, sum_query(1, 3, 10), DpBudget(1.0, 0.1), 0.05).lambda_warning);
  CHECK_FALSE(plan_parameters(2, sum_query(1, 3, 9), DpBudget(1.0, 0.1), 0.05).lambda_warning);
}

TEST_CASE("budget and spec validation") {
  CHECK_THROWS_AS(DpBudget(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(DpBudget(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DpBudget(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(sum_query(0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sum_query(1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(plan_parameters(0, sum_query(1, 10, 1), DpBudget(1.0, 0.1), 0.05),
                  std::invalid_argument);
}
