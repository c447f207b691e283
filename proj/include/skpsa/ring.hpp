#pragma once

// Arithmetic over Z_q for an odd prime q < 2^63, with the centered
// representative convention used everywhere in this library: a residue is
// stored in [0, q) and lifted to [-(q-1)/2, (q-1)/2] whenever a signed
// magnitude (an error term, a norm) is needed.

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "skpsa/rng.hpp"

namespace skpsa {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(uint64_t n);

// Smallest prime >= lower_bound.  Requires 2 <= lower_bound < 2^62; the
// search itself never leaves the 64-bit range (Bertrand).
uint64_t next_prime(uint64_t lower_bound);

class Modulus {
 public:
  // Accepts odd primes in [3, 2^63).  The 2^63 ceiling keeps every product
  // of two residues inside unsigned 128-bit intermediates.
  explicit Modulus(uint64_t q);

  uint64_t value() const { return q_; }
  // (q-1)/2, the largest magnitude of a centered representative.
  int64_t half() const { return static_cast<int64_t>(q_ >> 1); }

  uint64_t add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;  // a, b < q < 2^63, no overflow
    return s >= q_ ? s - q_ : s;
  }
  uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + q_ - b; }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : q_ - a; }
  uint64_t mul(uint64_t a, uint64_t b) const {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % q_);
  }

  bool operator==(const Modulus& o) const { return q_ == o.q_; }

 private:
  uint64_t q_;
};

class Residue {
 public:
  Residue(uint64_t value, Modulus q) : v_(value), q_(q) {
    if (v_ >= q_.value()) throw std::invalid_argument("Residue: value out of range");
  }
  uint64_t value() const { return v_; }
  Modulus modulus() const { return q_; }

 private:
  uint64_t v_;
  Modulus q_;
};

inline int64_t lift_central(uint64_t v, const Modulus& q) {
  return v <= static_cast<uint64_t>(q.half()) ? static_cast<int64_t>(v)
                                              : static_cast<int64_t>(v) - static_cast<int64_t>(q.value());
}

inline int64_t lift_central(const Residue& r) { return lift_central(r.value(), r.modulus()); }

// Canonical representative of x mod q.  |x| < 2^62 keeps x % q exact.
inline Residue reduce(int64_t x, const Modulus& q) {
  if (x <= -(int64_t(1) << 62) || x >= (int64_t(1) << 62))
    throw std::invalid_argument("reduce: |x| too large");
  int64_t m = x % static_cast<int64_t>(q.value());
  if (m < 0) m += static_cast<int64_t>(q.value());
  return Residue(static_cast<uint64_t>(m), q);
}

class ZqVector {
 public:
  ZqVector(size_t len, Modulus q) : q_(q), v_(len, 0) {}
  ZqVector(std::vector<uint64_t> values, Modulus q) : q_(q), v_(std::move(values)) {
    for (uint64_t x : v_)
      if (x >= q_.value()) throw std::invalid_argument("ZqVector: entry out of range");
  }

  size_t size() const { return v_.size(); }
  Modulus modulus() const { return q_; }
  uint64_t operator[](size_t i) const { return v_[i]; }
  Residue at(size_t i) const { return Residue(v_[i], q_); }
  void set(size_t i, uint64_t value) {
    if (value >= q_.value()) throw std::invalid_argument("ZqVector::set: value out of range");
    v_[i] = value;
  }
  const std::vector<uint64_t>& raw() const { return v_; }

  bool operator==(const ZqVector& o) const { return q_ == o.q_ && v_ == o.v_; }

 private:
  Modulus q_;
  std::vector<uint64_t> v_;
};

// Row-major matrix over Z_q.
class ZqMatrix {
 public:
  ZqMatrix(size_t rows, size_t cols, Modulus q) : q_(q), rows_(rows), cols_(cols), v_(rows * cols, 0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  Modulus modulus() const { return q_; }
  uint64_t operator()(size_t r, size_t c) const { return v_[r * cols_ + c]; }
  void set(size_t r, size_t c, uint64_t value) {
    if (value >= q_.value()) throw std::invalid_argument("ZqMatrix::set: value out of range");
    v_[r * cols_ + c] = value;
  }
  const std::vector<uint64_t>& raw() const { return v_; }

  bool operator==(const ZqMatrix& o) const = default;

 private:
  Modulus q_;
  size_t rows_, cols_;
  std::vector<uint64_t> v_;
};

ZqVector vec_add(const ZqVector& a, const ZqVector& b);
ZqVector vec_sub(const ZqVector& a, const ZqVector& b);
ZqVector vec_neg(const ZqVector& a);
ZqVector vec_scale(const ZqVector& a, uint64_t c);

Residue inner_product(const ZqVector& a, const ZqVector& b);
ZqVector mat_vec_mul(const ZqMatrix& A, const ZqVector& x);
ZqMatrix mat_mul(const ZqMatrix& A, const ZqMatrix& B);

// L_inf norm of the centered lift.
int64_t norm_inf_central(const ZqVector& a);

Residue sample_uniform_residue(const Modulus& q, RandomStream& rng);
ZqVector sample_uniform_vector(size_t len, const Modulus& q, RandomStream& rng);
ZqMatrix sample_uniform_matrix(size_t rows, size_t cols, const Modulus& q, RandomStream& rng);

// Binary interchange format: magic "ZQV1", q as 8-byte LE, then the shape
// (length for vectors, rows then cols for matrices) as 8-byte LE, then each
// residue as 8-byte LE.  deserialize_* validates shape and modulus against
// the caller's expectation and rejects residues >= q, truncated input, and
// trailing bytes.
std::vector<uint8_t> serialize_vector(const ZqVector& v);
ZqVector deserialize_vector(std::span<const uint8_t> bytes, size_t expected_len, const Modulus& expected_q);
std::vector<uint8_t> serialize_matrix(const ZqMatrix& m);
ZqMatrix deserialize_matrix(std::span<const uint8_t> bytes, size_t expected_rows, size_t expected_cols,
                            const Modulus& expected_q);

}  // namespace skpsa
