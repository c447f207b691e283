#include "skpsa/lossy.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "skpsa/parallel.hpp"

namespace skpsa {

namespace {

void check_shape(int64_t kappa, int64_t lambda) {
  if (kappa < 1) throw std::invalid_argument("lossy: kappa must be positive");
  if (lambda < 1) throw std::invalid_argument("lossy: lambda must be positive");
}

// Number of candidate secrets q^kappa, guarded so the exact enumeration
// stays at desk scale.  The log-space check runs before any multiplication,
// so the product below cannot overflow.
size_t checked_candidate_count(size_t kappa, const Modulus& q) {
  const double bits = static_cast<double>(kappa) * std::log2(static_cast<double>(q.value()));
  if (bits > std::log2(1e6) + 1e-9)
    throw std::invalid_argument("lossy: q^kappa exceeds the 1e6 enumeration cap");
  size_t total = 1;
  for (size_t i = 0; i < kappa; ++i) total *= q.value();
  return total;
}

ZqVector observe(const ZqMatrix& A, const ZqVector& x, const std::vector<int64_t>& e) {
  if (x.size() != A.cols()) throw std::invalid_argument("lossy: secret length mismatch");
  if (e.size() != A.rows()) throw std::invalid_argument("lossy: noise length mismatch");
  const Modulus q = A.modulus();
  ZqVector y = mat_vec_mul(A, x);
  for (size_t j = 0; j < y.size(); ++j) y.set(j, q.add(y[j], reduce(e[j], q).value()));
  return y;
}

// Enumerates all q^kappa candidates in secret_index order and calls
// visit(index, Az).  The candidate walks as a little-endian odometer and Az
// is updated one column addition per digit increment, so the whole sweep
// costs O(total * lambda) ring additions instead of a mat-vec per candidate.
// A wrapped digit has absorbed exactly q copies of its column, which is a
// net zero mod q, so the accumulator never needs resetting.
template <typename Visit>
void for_each_candidate(const ZqMatrix& A, size_t total, Visit&& visit) {
  const Modulus q = A.modulus();
  const size_t kappa = A.cols();
  const size_t lambda = A.rows();
  const uint64_t qv = q.value();
  std::vector<uint64_t> digits(kappa, 0);
  std::vector<uint64_t> az(lambda, 0);
  for (size_t idx = 0; idx < total; ++idx) {
    visit(idx, az);
    if (idx + 1 == total) break;
    size_t d = 0;
    while (d < kappa) {
      digits[d] += 1;
      for (size_t j = 0; j < lambda; ++j) az[j] = q.add(az[j], A(j, d));
      if (digits[d] == qv) {
        digits[d] = 0;
        ++d;
      } else {
        break;
      }
    }
  }
}

// Skellam draw conditioned on the table window.  The window carries all but
// ~1e-12 of the mass, so the rejection loop is a formality that keeps the
// sample law identical to the density the oracle scores with.
int64_t sample_skellam_windowed(const SkellamParams& p, const PmfTable& window, RandomStream& rng) {
  for (;;) {
    const int64_t v = sample_skellam(p, rng);
    if (v >= window.k_min && v <= window.k_max()) return v;
  }
}

}  // namespace

LweInstance gen_lwe_instance(int64_t kappa, int64_t lambda, const Modulus& q,
                             const NoiseSampler& noise, RandomStream& rng) {
  check_shape(kappa, lambda);
  if (!noise) throw std::invalid_argument("gen_lwe_instance: noise sampler is empty");
  LweInstance inst{
      sample_uniform_matrix(static_cast<size_t>(lambda), static_cast<size_t>(kappa), q, rng),
      ZqVector(static_cast<size_t>(lambda), q),
      sample_uniform_vector(static_cast<size_t>(kappa), q, rng),
      {}};
  inst.e.reserve(static_cast<size_t>(lambda));
  for (int64_t j = 0; j < lambda; ++j) inst.e.push_back(noise(rng));
  inst.y = observe(inst.A, inst.x, inst.e);
  return inst;
}

std::pair<ZqMatrix, ZqVector> gen_dlwe_challenge(int64_t kappa, int64_t lambda, const Modulus& q,
                                                 const NoiseSampler& noise, int coin,
                                                 RandomStream& rng) {
  if (coin != 0 && coin != 1) throw std::invalid_argument("gen_dlwe_challenge: coin must be 0 or 1");
  if (coin == 1) {
    LweInstance inst = gen_lwe_instance(kappa, lambda, q, noise, rng);
    return {std::move(inst.A), std::move(inst.y)};
  }
  check_shape(kappa, lambda);
  ZqMatrix A = sample_uniform_matrix(static_cast<size_t>(lambda), static_cast<size_t>(kappa), q, rng);
  ZqVector y = sample_uniform_vector(static_cast<size_t>(lambda), q, rng);
  return {std::move(A), std::move(y)};
}

int64_t LossyCode::g_at(size_t r, size_t c) const { return g[r * a_prime.cols() + c]; }

LossyCode gen_lossy_code(int64_t kappa, int64_t lambda, const Modulus& q, double nu,
                         RandomStream& rng) {
  check_shape(kappa, lambda);
  if (kappa % 2 != 0) throw std::invalid_argument("gen_lossy_code: kappa must be even");
  const size_t half = static_cast<size_t>(kappa) / 2;
  const size_t rows = static_cast<size_t>(lambda);
  const GaussianParams gp(nu);

  LossyCode code{ZqMatrix(rows, static_cast<size_t>(kappa), q),
                 sample_uniform_matrix(rows, half, q, rng),
                 sample_uniform_matrix(half, half, q, rng),
                 {},
                 nu};
  code.g.reserve(rows * half);
  for (size_t i = 0; i < rows * half; ++i) code.g.push_back(sample_discrete_gaussian(gp, rng));

  // Right block is A'T + G, so the assembled matrix sends (-Tw | w) to Gw.
  const ZqMatrix at = mat_mul(code.a_prime, code.t_mix);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < half; ++c) {
      code.A.set(r, c, code.a_prime(r, c));
      code.A.set(r, half + c, q.add(at(r, c), reduce(code.g[r * half + c], q).value()));
    }
  }
  return code;
}

ZqVector embed_secret(const LossyCode& code, const ZqVector& w) {
  const Modulus q = code.A.modulus();
  const size_t half = code.t_mix.rows();
  if (w.size() != half) throw std::invalid_argument("embed_secret: half-secret length mismatch");
  if (!(w.modulus() == q)) throw std::invalid_argument("embed_secret: modulus mismatch");
  const ZqVector tw = vec_neg(mat_vec_mul(code.t_mix, w));
  ZqVector x(2 * half, q);
  for (size_t i = 0; i < half; ++i) {
    x.set(i, tw[i]);
    x.set(half + i, w[i]);
  }
  return x;
}

size_t secret_index(const ZqVector& z) {
  // Little-endian mixed radix; callers guarantee q^kappa fits in size_t.
  size_t idx = 0;
  for (size_t i = z.size(); i-- > 0;) idx = idx * z.modulus().value() + z[i];
  return idx;
}

ZqVector secret_from_index(size_t index, size_t kappa, const Modulus& q) {
  ZqVector z(kappa, q);
  for (size_t i = 0; i < kappa; ++i) {
    z.set(i, index % q.value());
    index /= q.value();
  }
  if (index != 0) throw std::invalid_argument("secret_from_index: index out of range");
  return z;
}

EntropyReport entropy_oracle(const ZqMatrix& A, const ZqVector& x, const std::vector<int64_t>& e,
                             const PmfTable& pmf) {
  const Modulus q = A.modulus();
  const size_t total = checked_candidate_count(A.cols(), q);
  const ZqVector y = observe(A, x, e);

  EntropyReport report;
  report.truncation_mass = pmf.truncated_mass;
  report.posterior.assign(total, 0.0);

  // Candidate weights are plain double products of per-row densities.  At
  // desk scale (a handful of rows, pmf values above 1e-40) this stays far
  // from underflow, and exact zeros only appear when a residual falls
  // outside the table window.
  double mass = 0.0;
  for_each_candidate(A, total, [&](size_t idx, const std::vector<uint64_t>& az) {
    double w = 1.0;
    for (size_t j = 0; j < az.size(); ++j) {
      w *= pmf.at(lift_central(q.sub(y[j], az[j]), q));
      if (w == 0.0) break;
    }
    report.posterior[idx] = w;
    mass += w;
  });

  if (mass <= 0.0)
    throw std::runtime_error("entropy_oracle: observation impossible under the truncated density");
  for (double& w : report.posterior) w /= mass;

  const double p_true = report.posterior[secret_index(x)];
  if (p_true <= 0.0)
    throw std::runtime_error("entropy_oracle: true secret has zero posterior mass");
  report.entropy_bits = -std::log2(p_true);
  return report;
}

bool uniqueness_check(const ZqMatrix& A, const ZqVector& x, const std::vector<int64_t>& e, int64_t r) {
  if (r < 0) throw std::invalid_argument("uniqueness_check: radius must be nonnegative");
  const Modulus q = A.modulus();
  const size_t total = checked_candidate_count(A.cols(), q);
  const ZqVector y = observe(A, x, e);
  const size_t self = secret_index(x);

  bool unique = true;
  for_each_candidate(A, total, [&](size_t idx, const std::vector<uint64_t>& az) {
    if (!unique || idx == self) return;
    for (size_t j = 0; j < az.size(); ++j) {
      const int64_t resid = lift_central(q.sub(y[j], az[j]), q);
      if (resid > r || resid < -r) return;
    }
    unique = false;
  });
  return unique;
}

LossinessResult lossiness_experiment(int64_t kappa, int64_t lambda, const Modulus& q, double nu,
                                     double mu, int64_t trials, RandomStream& rng,
                                     unsigned workers) {
  check_shape(kappa, lambda);
  if (kappa % 2 != 0) throw std::invalid_argument("lossiness_experiment: kappa must be even");
  if (trials < 1) throw std::invalid_argument("lossiness_experiment: trials must be positive");
  checked_candidate_count(static_cast<size_t>(kappa), q);
  const SkellamParams sp(mu);
  const GaussianParams gp(nu);
  const PmfTable table = skellam_pmf_table(sp);

  // Every trial runs on its own stream seeded before any work starts, so
  // the outputs are a pure function of rng regardless of worker count.
  const size_t n = static_cast<size_t>(trials);
  std::vector<uint64_t> seeds(2 * n);
  for (auto& s : seeds) s = rng.next_u64();

  LossinessResult result;
  result.lossy_bits.assign(n, 0.0);
  result.uniform_bits.assign(n, 0.0);

  parallel_for(2 * n, workers, [&](size_t i) {
    RandomStream tr(seeds[i]);
    const bool lossy = i < n;
    ZqMatrix A = lossy ? gen_lossy_code(kappa, lambda, q, nu, tr).A
                       : sample_uniform_matrix(static_cast<size_t>(lambda),
                                               static_cast<size_t>(kappa), q, tr);
    const ZqVector x = sample_uniform_vector(static_cast<size_t>(kappa), q, tr);
    std::vector<int64_t> e(static_cast<size_t>(lambda));
    for (auto& v : e) v = sample_skellam_windowed(sp, table, tr);
    const double bits = entropy_oracle(A, x, e, table).entropy_bits;
    (lossy ? result.lossy_bits : result.uniform_bits)[lossy ? i : i - n] = bits;
  });
  return result;
}

SmallNormResult smallnorm_experiment(int64_t lambda, int64_t zeta, double nu, double s,
                                     int64_t trials, RandomStream& rng) {
  if (lambda < 1 || zeta < 1) throw std::invalid_argument("smallnorm_experiment: bad shape");
  if (!(s > 0.0)) throw std::invalid_argument("smallnorm_experiment: s must be positive");
  if (trials < 1) throw std::invalid_argument("smallnorm_experiment: trials must be positive");
  const GaussianParams gp(nu);

  const double l1_threshold = static_cast<double>(lambda) * std::sqrt(static_cast<double>(zeta) * nu * s);
  const double l2_threshold = static_cast<double>(lambda) * static_cast<double>(zeta) * nu * s;

  SmallNormResult result;
  result.trials = trials;
  int64_t l1_hits = 0;
  int64_t l2_hits = 0;
  for (int64_t t = 0; t < trials; ++t) {
    // z is all-ones, so G z reduces to the vector of row sums of G.
    double l1 = 0.0;
    double l2 = 0.0;
    for (int64_t r = 0; r < lambda; ++r) {
      int64_t row = 0;
      for (int64_t c = 0; c < zeta; ++c) row += sample_discrete_gaussian(gp, rng);
      const double rd = static_cast<double>(row);
      l1 += std::abs(rd);
      l2 += rd * rd;
    }
    if (l1 > l1_threshold) ++l1_hits;
    if (l2 > l2_threshold) ++l2_hits;
  }
  result.l1_exceed_rate = static_cast<double>(l1_hits) / static_cast<double>(trials);
  result.l2_exceed_rate = static_cast<double>(l2_hits) / static_cast<double>(trials);
  return result;
}

DistinguisherReport distinguisher_harness(const Solver& solver, int64_t kappa, int64_t lambda,
                                          const Modulus& q, double nu, double mu, int64_t trials,
                                          RandomStream& rng) {
  if (!solver) throw std::invalid_argument("distinguisher_harness: solver is empty");
  check_shape(kappa, lambda);
  if (kappa % 2 != 0) throw std::invalid_argument("distinguisher_harness: kappa must be even");
  if (trials < 1) throw std::invalid_argument("distinguisher_harness: trials must be positive");
  const SkellamParams sp(mu);

  int64_t wins_uniform = 0;
  int64_t wins_lossy = 0;
  for (int law = 0; law < 2; ++law) {
    const bool lossy = law == 1;
    for (int64_t t = 0; t < trials; ++t) {
      ZqMatrix A = lossy ? gen_lossy_code(kappa, lambda, q, nu, rng).A
                         : sample_uniform_matrix(static_cast<size_t>(lambda),
                                                 static_cast<size_t>(kappa), q, rng);
      const ZqVector x = sample_uniform_vector(static_cast<size_t>(kappa), q, rng);
      std::vector<int64_t> e(static_cast<size_t>(lambda));
      for (auto& v : e) v = sample_skellam(sp, rng);
      const ZqVector y = observe(A, x, e);
      if (solver(A, y) == x) ++(lossy ? wins_lossy : wins_uniform);
    }
  }

  DistinguisherReport report;
  report.trials = trials;
  report.success_uniform = static_cast<double>(wins_uniform) / static_cast<double>(trials);
  report.success_lossy = static_cast<double>(wins_lossy) / static_cast<double>(trials);
  report.advantage = report.success_uniform - report.success_lossy;
  return report;
}

}  // namespace skpsa
