#pragma once

// Private stream aggregation from a noised inner-product PRF.  Users
// 1..n hold i.i.d. uniform keys s_1..s_n in Z_q^kappa; the aggregator holds
// s_0 = -(s_1 + ... + s_n).  At time t with public tag vector t_j, user i
// publishes <t_j, s_i> + e + x_i with fresh Skellam noise e.  Because the
// keys sum to zero, the aggregator recovers sum x_i + sum e_i and nothing
// else; the per-user noise shares add up to the planned total variance.

#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "skpsa/ring.hpp"
#include "skpsa/rng.hpp"

namespace skpsa {

struct PsaPublicParams {
  int64_t kappa;
  Modulus q;
  int64_t n;       // number of users
  int64_t lambda;  // number of time points
  // Per-user Skellam variance.  Zero switches noise off entirely; that mode
  // exists for exactness tests and is never private.
  double mu_user;
  std::vector<ZqVector> tags;  // lambda distinct uniform tag vectors
};

struct PsaKeys {
  // keys[0] is the aggregator key s_0; keys[i] for i in 1..n are user keys.
  // Invariant: the n+1 keys sum to zero coordinate-wise.
  std::vector<ZqVector> keys;
};

struct Ciphertext {
  uint32_t user_index;  // 1-based
  uint32_t time_index;  // 0-based
  uint64_t c;           // residue mod q
};

// lambda distinct uniform tags, by rejection on collision.
std::vector<ZqVector> psa_gen_tags(int64_t kappa, const Modulus& q, int64_t lambda, RandomStream& rng);

PsaKeys psa_keygen(const PsaPublicParams& pp, RandomStream& rng);

std::pair<PsaPublicParams, PsaKeys> psa_setup(int64_t kappa, const Modulus& q, int64_t n, int64_t lambda,
                                              double mu_user, RandomStream& rng);

// The noised inner-product PRF value <t, s> + e with e ~ Sk_mu (no noise
// when mu_user is zero).
Residue weak_prf(const ZqVector& s, const ZqVector& t, double mu_user, RandomStream& rng);

struct EncryptResult {
  Ciphertext ct;
  int64_t noise;  // the Skellam draw baked into ct, recorded for experiments
};

// c = <t, s> + e + x mod q.  |x| must stay below 2^62; range policy (the
// [-m, m] clip) is the caller's responsibility.
EncryptResult psa_encrypt(const PsaPublicParams& pp, uint32_t user_index, const ZqVector& key,
                          uint32_t time_index, int64_t x, RandomStream& rng);

// Requires exactly one ciphertext per user, all at time_index.  Returns the
// centered lift of <t, s_0> + sum c_i, i.e. sum x_i + sum e_i whenever that
// total stays inside (-(q-1)/2, (q-1)/2].
int64_t psa_aggregate_decrypt(const PsaPublicParams& pp, const ZqVector& s0, uint32_t time_index,
                              std::span<const Ciphertext> cts);

// Wire form: magic "PSA1", user_index (4-byte LE), time_index (4-byte LE),
// residue (8-byte LE); 20 bytes total.
std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct);
Ciphertext deserialize_ciphertext(std::span<const uint8_t> bytes, const Modulus& q);

// Guards the one-ciphertext-per-(user, time) freshness rule within a run.
class TimePointLedger {
 public:
  // Throws std::logic_error on a repeated (user, time) pair.
  void note(uint32_t user_index, uint32_t time_index);

 private:
  std::unordered_set<uint64_t> seen_;
};

}  // namespace skpsa
