// skpsa: parameter planning, key generation, aggregation simulation,
// distribution test suites and lossy-code experiments.  Flags override
// values from --config; every command is deterministic given --seed.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "skpsa/cli.hpp"

namespace {

struct RunOptions {
  CLI::Option* kappa = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* m = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* zero_noise = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* keys = nullptr;
  CLI::Option* data = nullptr;
};

RunOptions add_run_flags(CLI::App* sub, skpsa::RunConfig& cfg, std::string& config_path) {
  RunOptions o;
  sub->add_option("--config", config_path, "JSON config file; flags override its values");
  o.kappa = sub->add_option("--kappa", cfg.kappa, "secret dimension");
  o.n = sub->add_option("--n", cfg.n, "number of users");
  o.m = sub->add_option("--m", cfg.m, "per-user bound, values lie in [-m, m]");
  o.lambda = sub->add_option("--lambda", cfg.lambda, "number of time steps / queries");
  o.epsilon = sub->add_option("--epsilon", cfg.epsilon, "privacy budget epsilon");
  o.delta = sub->add_option("--delta", cfg.delta, "privacy budget delta");
  o.beta = sub->add_option("--beta", cfg.beta, "accuracy failure probability");
  o.seed = sub->add_option("--seed", cfg.seed, "master seed");
  o.zero_noise = sub->add_flag("--zero-noise", cfg.zero_noise, "disable noise (exactness tests only)");
  o.out = sub->add_option("--out", cfg.out, "output file path");
  o.keys = sub->add_option("--keys", cfg.keys, "keys JSON path");
  o.data = sub->add_option("--data", cfg.data, "user data CSV (lambda rows, n columns)");
  return o;
}

// Re-resolve the run config after parsing: file values fill every field the
// command line left untouched.
skpsa::RunConfig resolve(const skpsa::RunConfig& flags, const RunOptions& o,
                         const std::string& config_path) {
  if (config_path.empty()) return flags;
  skpsa::RunConfig cfg = skpsa::run_config_from_json(config_path, skpsa::RunConfig{});
  if (o.kappa->count() > 0) cfg.kappa = flags.kappa;
  if (o.n->count() > 0) cfg.n = flags.n;
  if (o.m->count() > 0) cfg.m = flags.m;
  if (o.lambda->count() > 0) cfg.lambda = flags.lambda;
  if (o.epsilon->count() > 0) cfg.epsilon = flags.epsilon;
  if (o.delta->count() > 0) cfg.delta = flags.delta;
  if (o.beta->count() > 0) cfg.beta = flags.beta;
  if (o.seed->count() > 0) cfg.seed = flags.seed;
  if (o.zero_noise->count() > 0) cfg.zero_noise = flags.zero_noise;
  if (o.out->count() > 0) cfg.out = flags.out;
  if (o.keys->count() > 0) cfg.keys = flags.keys;
  if (o.data->count() > 0) cfg.data = flags.data;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skellam-noise private stream aggregation toolkit"};
  app.require_subcommand(1);

  skpsa::RunConfig run_cfg;
  std::string config_path;

  auto* params = app.add_subcommand("params", "plan and print DP/security parameters");
  const RunOptions params_opts = add_run_flags(params, run_cfg, config_path);
  auto* keygen = app.add_subcommand("keygen", "generate the aggregator and user keys");
  const RunOptions keygen_opts = add_run_flags(keygen, run_cfg, config_path);
  auto* simulate = app.add_subcommand("simulate", "run aggregation over all time steps");
  const RunOptions simulate_opts = add_run_flags(simulate, run_cfg, config_path);

  skpsa::DistTestConfig dist_cfg;
  auto* dist = app.add_subcommand("dist-test", "statistical test suites for the samplers");
  dist->add_option("--dist", dist_cfg.distribution, "skellam, gaussian or poisson")->required();
  dist->add_option("--mu", dist_cfg.mu, "Skellam variance");
  dist->add_option("--nu", dist_cfg.nu, "Gaussian variance");
  dist->add_option("--mean", dist_cfg.mean, "Poisson mean");
  dist->add_option("--samples", dist_cfg.samples, "sample count, at least 10^4");
  dist->add_option("--seed", dist_cfg.seed, "master seed");

  skpsa::LossyConfig lossy_cfg;
  auto* lossy = app.add_subcommand("lossy", "entropy experiment, lossy code vs uniform matrix");
  lossy->add_option("--kappa", lossy_cfg.kappa, "secret dimension (even)");
  lossy->add_option("--lambda", lossy_cfg.lambda, "rows per instance");
  lossy->add_option("--q", lossy_cfg.q, "prime modulus (q^kappa capped at 10^6)");
  lossy->add_option("--nu", lossy_cfg.nu, "Gaussian variance of the G block");
  lossy->add_option("--mu", lossy_cfg.mu, "Skellam noise variance");
  lossy->add_option("--trials", lossy_cfg.trials, "trials per law");
  lossy->add_option("--seed", lossy_cfg.seed, "master seed");
  lossy->add_option("--out", lossy_cfg.out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (params->parsed()) return skpsa::cmd_params(resolve(run_cfg, params_opts, config_path), std::cout);
    if (keygen->parsed()) return skpsa::cmd_keygen(resolve(run_cfg, keygen_opts, config_path), std::cout);
    if (simulate->parsed())
      return skpsa::cmd_simulate(resolve(run_cfg, simulate_opts, config_path), std::cout);
    if (dist->parsed()) return skpsa::cmd_dist_test(dist_cfg, std::cout);
    if (lossy->parsed()) return skpsa::cmd_lossy(lossy_cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
