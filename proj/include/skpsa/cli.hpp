#pragma once

// Command surface behind the skpsa binary.  Each cmd_* function implements
// one subcommand end to end and returns its process exit code, so the
// binary's main() stays a thin argument parser.  Exit convention: 0 success,
// 1 usage or configuration error, 2 plan infeasible or test-suite failure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skpsa/psa.hpp"

namespace skpsa {

// Shared knobs for params, keygen and simulate.  Defaults reproduce the
// headline plan (20000 users, per-user bound 1000, unit budget).
struct RunConfig {
  int64_t kappa = 200;
  int64_t n = 20000;
  int64_t m = 1000;
  int64_t lambda = 1;
  double epsilon = 1.0;
  double delta = 0.1;
  double beta = 0.05;
  uint64_t seed = 1;
  bool zero_noise = false;
  std::string out;   // primary output file
  std::string keys;  // keys JSON consumed by simulate
  std::string data;  // optional per-user data CSV consumed by simulate
};

struct DistTestConfig {
  std::string distribution;  // "skellam", "gaussian" or "poisson"
  double mu = 1.0;
  double nu = 1.0;
  double mean = 1.0;
  int64_t samples = 1000000;
  uint64_t seed = 1;
};

struct LossyConfig {
  int64_t kappa = 2;
  int64_t lambda = 12;
  uint64_t q = 23;
  double nu = 0.01;
  double mu = 1.44;
  int64_t trials = 200;
  uint64_t seed = 1;
  std::string out;
};

// Worker budget for parallel sections: hardware concurrency capped by the
// PSA_THREADS environment variable when that parses as a positive integer.
unsigned effective_workers();

// Shortest decimal string that parses back to exactly x.
std::string fmt_double(double x);

// Returns base with every field present in the JSON document at path
// replaced.  Unknown keys are an error.  Throws std::runtime_error on I/O
// or parse problems, std::invalid_argument on bad values.
RunConfig run_config_from_json(const std::string& path, const RunConfig& base);

// One aggregation run over all lambda time steps.  Per-(user, time) streams
// are derived from seed, so results do not depend on worker count or row
// order.  data, when non-null, supplies lambda rows of n raw user values
// that are clipped to [-m, m] (clip count reported); otherwise values are
// drawn uniformly from [-m, m].
struct SimulationReport {
  struct Row {
    uint32_t time_index;
    int64_t true_sum;
    int64_t noisy_sum;
  };
  std::vector<Row> rows;
  double alpha = 0.0;           // accuracy target the run was planned for
  double empirical_beta = 0.0;  // fraction of |error| > alpha
  double mean_error = 0.0;
  double variance_error = 0.0;
  double gof_p_value = 0.0;  // error sample vs Sk_{n mu_user}
  // False when noise is off, when fewer than 100 steps were run, when
  // n mu_user exceeds 1e6 (the exact window sweep stops being affordable),
  // or when the sample degenerates.
  bool gof_valid = false;
  int64_t clipped_values = 0;
};

SimulationReport run_simulation(const PsaPublicParams& pp, const PsaKeys& keys, int64_t m,
                                double alpha, uint64_t seed,
                                const std::vector<std::vector<int64_t>>* data, unsigned workers);

int cmd_params(const RunConfig& cfg, std::ostream& out);
int cmd_keygen(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_dist_test(const DistTestConfig& cfg, std::ostream& out);
int cmd_lossy(const LossyConfig& cfg, std::ostream& out);

}  // namespace skpsa
