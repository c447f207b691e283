#pragma once

// Deterministic random streams.
//
// Every stochastic routine in this library draws from a RandomStream handle
// that the caller seeds explicitly.  Two runs with the same seed produce
// byte-identical results on a given platform.  Independent streams (one per
// user/time pair, one per experiment trial) are derived from a master seed
// with derive_seed(); the derivation is a fixed 64-bit mixing chain, so the
// assignment of streams to tasks does not depend on scheduling order.

#include <cstdint>
#include <string_view>

namespace skpsa {

// splitmix64 finalizer (Steele/Lea/Flood).  Bijective on 64-bit words.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a over the label bytes; keeps derivations with distinct labels
// ("user", "time", "trial", ...) in distinct seed spaces.
constexpr uint64_t hash_label(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Seed for a child stream:  fold each (label, index) pair into the master
// seed through mix64.  derive_seed(s, "user", i, "time", j) is the stream
// id used by the aggregation simulator.
constexpr uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index) {
  uint64_t h = mix64(master ^ hash_label(label));
  return mix64(h ^ index);
}

constexpr uint64_t derive_seed(uint64_t master, std::string_view l1, uint64_t i1,
                               std::string_view l2, uint64_t i2) {
  return derive_seed(derive_seed(master, l1, i1), l2, i2);
}

// xoshiro256++ 1.0 (Blackman/Vigna), state seeded by splitmix64 expansion.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ull;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; safe as a log() argument.
  double next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; no modulo bias.
  uint64_t next_below(uint64_t bound) {
    uint64_t mask = ~0ull;
    if (bound > 1) {
      mask = (~0ull) >> __builtin_clzll(bound - 1);
    } else {
      return 0;
    }
    for (;;) {
      uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  uint64_t s_[4];
};

}  // namespace skpsa
