#include "skpsa/psa.hpp"

#include <stdexcept>
#include <string>

#include "skpsa/samplers.hpp"

namespace skpsa {

namespace {

void check_params(int64_t kappa, int64_t n, int64_t lambda, double mu_user) {
  if (kappa < 1) throw std::invalid_argument("psa: kappa must be positive");
  if (n < 1) throw std::invalid_argument("psa: n must be positive");
  if (lambda < 1) throw std::invalid_argument("psa: lambda must be positive");
  if (!(mu_user >= 0.0)) throw std::invalid_argument("psa: mu_user must be nonnegative");
}

uint64_t tag_fingerprint(const ZqVector& t) {
  uint64_t h = 0x9e3779b97f4a7c15ull;
  for (size_t i = 0; i < t.size(); ++i) h = mix64(h ^ t[i]);
  return h;
}

}  // namespace

std::vector<ZqVector> psa_gen_tags(int64_t kappa, const Modulus& q, int64_t lambda, RandomStream& rng) {
  check_params(kappa, 1, lambda, 0.0);
  std::vector<ZqVector> tags;
  tags.reserve(static_cast<size_t>(lambda));
  std::unordered_set<uint64_t> seen;
  while (tags.size() < static_cast<size_t>(lambda)) {
    ZqVector t = sample_uniform_vector(static_cast<size_t>(kappa), q, rng);
    // Fingerprint collisions force a full comparison; genuine duplicates are
    // rejected so every time point gets a distinct tag.
    const uint64_t fp = tag_fingerprint(t);
    if (seen.count(fp)) {
      bool dup = false;
      for (const auto& prev : tags)
        if (prev == t) {
          dup = true;
          break;
        }
      if (dup) continue;
    }
    seen.insert(fp);
    tags.push_back(std::move(t));
  }
  return tags;
}

PsaKeys psa_keygen(const PsaPublicParams& pp, RandomStream& rng) {
  PsaKeys out;
  out.keys.reserve(static_cast<size_t>(pp.n) + 1);
  ZqVector s0(static_cast<size_t>(pp.kappa), pp.q);
  out.keys.push_back(s0);  // placeholder, rewritten below
  for (int64_t i = 1; i <= pp.n; ++i) {
    ZqVector si = sample_uniform_vector(static_cast<size_t>(pp.kappa), pp.q, rng);
    s0 = vec_add(s0, si);
    out.keys.push_back(std::move(si));
  }
  out.keys[0] = vec_neg(s0);
  return out;
}

std::pair<PsaPublicParams, PsaKeys> psa_setup(int64_t kappa, const Modulus& q, int64_t n, int64_t lambda,
                                              double mu_user, RandomStream& rng) {
  check_params(kappa, n, lambda, mu_user);
  PsaPublicParams pp{kappa, q, n, lambda, mu_user, psa_gen_tags(kappa, q, lambda, rng)};
  PsaKeys keys = psa_keygen(pp, rng);
  return {std::move(pp), std::move(keys)};
}

Residue weak_prf(const ZqVector& s, const ZqVector& t, double mu_user, RandomStream& rng) {
  const Residue ip = inner_product(t, s);
  if (mu_user == 0.0) return ip;
  const int64_t e = sample_skellam(SkellamParams(mu_user), rng);
  return reduce(lift_central(ip) + e, s.modulus());
}

EncryptResult psa_encrypt(const PsaPublicParams& pp, uint32_t user_index, const ZqVector& key,
                          uint32_t time_index, int64_t x, RandomStream& rng) {
  if (user_index < 1 || static_cast<int64_t>(user_index) > pp.n)
    throw std::invalid_argument("psa_encrypt: user_index out of range");
  if (static_cast<int64_t>(time_index) >= pp.lambda)
    throw std::invalid_argument("psa_encrypt: time_index out of range");
  if (key.size() != static_cast<size_t>(pp.kappa) || !(key.modulus() == pp.q))
    throw std::invalid_argument("psa_encrypt: key shape mismatch");
  const Residue ip = inner_product(pp.tags[time_index], key);
  const int64_t e = pp.mu_user == 0.0 ? 0 : sample_skellam(SkellamParams(pp.mu_user), rng);
  const Residue c = reduce(lift_central(ip) + e + x, pp.q);
  return EncryptResult{Ciphertext{user_index, time_index, c.value()}, e};
}

int64_t psa_aggregate_decrypt(const PsaPublicParams& pp, const ZqVector& s0, uint32_t time_index,
                              std::span<const Ciphertext> cts) {
  if (static_cast<int64_t>(time_index) >= pp.lambda)
    throw std::invalid_argument("psa_aggregate_decrypt: time_index out of range");
  if (cts.size() != static_cast<size_t>(pp.n))
    throw std::invalid_argument("psa_aggregate_decrypt: need exactly one ciphertext per user");
  std::vector<bool> present(static_cast<size_t>(pp.n) + 1, false);
  uint64_t acc = inner_product(pp.tags[time_index], s0).value();
  for (const Ciphertext& ct : cts) {
    if (ct.time_index != time_index)
      throw std::invalid_argument("psa_aggregate_decrypt: ciphertext from a different time point");
    if (ct.user_index < 1 || static_cast<int64_t>(ct.user_index) > pp.n)
      throw std::invalid_argument("psa_aggregate_decrypt: user_index out of range");
    if (present[ct.user_index])
      throw std::invalid_argument("psa_aggregate_decrypt: duplicate ciphertext for a user");
    present[ct.user_index] = true;
    if (ct.c >= pp.q.value())
      throw std::invalid_argument("psa_aggregate_decrypt: residue out of range");
    acc = pp.q.add(acc, ct.c);
  }
  return lift_central(acc, pp.q);
}

std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct) {
  std::vector<uint8_t> out;
  out.reserve(20);
  out.push_back('P');
  out.push_back('S');
  out.push_back('A');
  out.push_back('1');
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(ct.user_index >> (8 * i)));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(ct.time_index >> (8 * i)));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(ct.c >> (8 * i)));
  return out;
}

Ciphertext deserialize_ciphertext(std::span<const uint8_t> bytes, const Modulus& q) {
  if (bytes.size() != 20) throw std::runtime_error("deserialize_ciphertext: need exactly 20 bytes");
  if (bytes[0] != 'P' || bytes[1] != 'S' || bytes[2] != 'A' || bytes[3] != '1')
    throw std::runtime_error("deserialize_ciphertext: bad magic");
  Ciphertext ct{0, 0, 0};
  for (int i = 0; i < 4; ++i) ct.user_index |= static_cast<uint32_t>(bytes[4 + i]) << (8 * i);
  for (int i = 0; i < 4; ++i) ct.time_index |= static_cast<uint32_t>(bytes[8 + i]) << (8 * i);
  for (int i = 0; i < 8; ++i) ct.c |= static_cast<uint64_t>(bytes[12 + i]) << (8 * i);
  if (ct.c >= q.value()) throw std::runtime_error("deserialize_ciphertext: residue out of range");
  return ct;
}

void TimePointLedger::note(uint32_t user_index, uint32_t time_index) {
  const uint64_t key = (static_cast<uint64_t>(user_index) << 32) | time_index;
  if (!seen_.insert(key).second)
    throw std::logic_error("TimePointLedger: (user " + std::to_string(user_index) + ", time " +
                           std::to_string(time_index) + ") already used");
}

}  // namespace skpsa
