#pragma once

// Lossy-code laboratory: planted LWE instances, the two-block lossy matrix
// construction, and a brute-force posterior oracle that measures how many
// bits of the secret an unbounded observer can still pin down.  Everything
// here runs at desk scale (q^kappa capped at 10^6 candidates) so that the
// information-theoretic quantities are computed exactly, not estimated.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "skpsa/ring.hpp"
#include "skpsa/rng.hpp"
#include "skpsa/samplers.hpp"

namespace skpsa {

using NoiseSampler = std::function<int64_t(RandomStream&)>;

struct LweInstance {
  ZqMatrix A;
  ZqVector y;  // A x + e
  ZqVector x;
  std::vector<int64_t> e;  // signed noise, pre-reduction
};

LweInstance gen_lwe_instance(int64_t kappa, int64_t lambda, const Modulus& q,
                             const NoiseSampler& noise, RandomStream& rng);

// Decision game: coin = 1 plants an LWE pair, coin = 0 replaces y by an
// independent uniform vector.
std::pair<ZqMatrix, ZqVector> gen_dlwe_challenge(int64_t kappa, int64_t lambda, const Modulus& q,
                                                 const NoiseSampler& noise, int coin, RandomStream& rng);

// A = (A' | A'T + G) with A' uniform lambda x kappa/2, T uniform
// kappa/2 x kappa/2, and G an integer matrix of D_nu draws.  For every
// half-secret w, A maps (-Tw | w) to G w, so when G is small the code
// collapses q^{kappa/2} secrets onto nearly identical observations.
struct LossyCode {
  ZqMatrix A;        // lambda x kappa
  ZqMatrix a_prime;  // lambda x kappa/2
  ZqMatrix t_mix;    // kappa/2 x kappa/2
  std::vector<int64_t> g;  // lambda x kappa/2 signed D_nu draws, row-major
  double nu;

  int64_t g_at(size_t r, size_t c) const;
};

// kappa must be even and at least 2.
LossyCode gen_lossy_code(int64_t kappa, int64_t lambda, const Modulus& q, double nu, RandomStream& rng);

// x' = (-T w | w); satisfies A x' = G w (mod q).
ZqVector embed_secret(const LossyCode& code, const ZqVector& w);

// Lexicographic index of a candidate secret: z_0 + z_1 q + z_2 q^2 + ...
size_t secret_index(const ZqVector& z);
ZqVector secret_from_index(size_t index, size_t kappa, const Modulus& q);

// Exact posterior over all q^kappa candidate secrets given y = A x + e and
// a truncated noise density: posterior(z) is proportional to the product of
// pmf(lift(y_j - (Az)_j)) over rows.  Reported entropy is the surprisal of
// the true secret, -log2 posterior(x).
struct EntropyReport {
  double entropy_bits = 0.0;
  std::vector<double> posterior;  // indexed by secret_index
  double truncation_mass = 0.0;   // mass the pmf table dropped
};

EntropyReport entropy_oracle(const ZqMatrix& A, const ZqVector& x, const std::vector<int64_t>& e,
                             const PmfTable& pmf);

// True iff no secret other than x explains A x + e with noise of sup-norm
// at most r (all norms on centered lifts).
bool uniqueness_check(const ZqMatrix& A, const ZqVector& x, const std::vector<int64_t>& e, int64_t r);

// Entropy distributions under the lossy code versus a uniform matrix, with
// x uniform and e drawn from Sk_mu truncated to the table window.  Trials
// run on independent derived streams; workers > 1 parallelizes trials
// without changing any output.
struct LossinessResult {
  std::vector<double> lossy_bits;
  std::vector<double> uniform_bits;
};

LossinessResult lossiness_experiment(int64_t kappa, int64_t lambda, const Modulus& q, double nu, double mu,
                                     int64_t trials, RandomStream& rng, unsigned workers = 1);

// Monte Carlo check of the small-norm bounds for z = all-ones: exceedance
// rates of ||Gz||_1 over lambda sqrt(zeta nu s) and ||Gz||_2^2 over
// lambda zeta nu s.
struct SmallNormResult {
  double l1_exceed_rate = 0.0;
  double l2_exceed_rate = 0.0;
  int64_t trials = 0;
};

SmallNormResult smallnorm_experiment(int64_t lambda, int64_t zeta, double nu, double s, int64_t trials,
                                     RandomStream& rng);

// Reduction harness: runs any candidate search algorithm on planted
// instances under both matrix laws and reports its success gap.  No solver
// ships with the library; callers supply their own.
using Solver = std::function<ZqVector(const ZqMatrix&, const ZqVector&)>;

struct DistinguisherReport {
  double success_uniform = 0.0;
  double success_lossy = 0.0;
  double advantage = 0.0;
  int64_t trials = 0;
};

DistinguisherReport distinguisher_harness(const Solver& solver, int64_t kappa, int64_t lambda,
                                          const Modulus& q, double nu, double mu, int64_t trials,
                                          RandomStream& rng);

}  // namespace skpsa
