#include "skpsa/ring.hpp"

#include <cstring>

namespace skpsa {

namespace {

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod) {
  unsigned __int128 acc = 1;
  unsigned __int128 b = base % mod;
  while (exp) {
    if (exp & 1) acc = acc * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<uint64_t>(acc);
}

// One Miller-Rabin round; n odd, n > 2, n - 1 = d * 2^r with d odd.
bool mr_witness(uint64_t n, uint64_t d, int r, uint64_t a) {
  uint64_t x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = static_cast<uint64_t>(static_cast<unsigned __int128>(x) * x % n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This witness set decides primality for every n < 2^64 (Sorenson/Webster).
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (!mr_witness(n, d, r, a)) return false;
  }
  return true;
}

uint64_t next_prime(uint64_t lower_bound) {
  if (lower_bound < 2 || lower_bound >= (uint64_t(1) << 62))
    throw std::invalid_argument("next_prime: lower_bound out of range");
  if (lower_bound == 2) return 2;
  uint64_t c = lower_bound | 1;  // first odd candidate >= lower_bound
  for (;; c += 2) {
    if (c >= (uint64_t(1) << 63)) throw std::overflow_error("next_prime: search left 63-bit range");
    if (is_prime(c)) return c;
  }
}

Modulus::Modulus(uint64_t q) : q_(q) {
  if (q < 3 || (q & 1) == 0 || q >= (uint64_t(1) << 63) || !is_prime(q))
    throw std::invalid_argument("Modulus: q must be an odd prime in [3, 2^63)");
}

namespace {

void check_same(const Modulus& a, const Modulus& b) {
  if (!(a == b)) throw std::invalid_argument("modulus mismatch");
}

}  // namespace

ZqVector vec_add(const ZqVector& a, const ZqVector& b) {
  check_same(a.modulus(), b.modulus());
  if (a.size() != b.size()) throw std::invalid_argument("vec_add: length mismatch");
  ZqVector out(a.size(), a.modulus());
  for (size_t i = 0; i < a.size(); ++i) out.set(i, a.modulus().add(a[i], b[i]));
  return out;
}

ZqVector vec_sub(const ZqVector& a, const ZqVector& b) {
  check_same(a.modulus(), b.modulus());
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: length mismatch");
  ZqVector out(a.size(), a.modulus());
  for (size_t i = 0; i < a.size(); ++i) out.set(i, a.modulus().sub(a[i], b[i]));
  return out;
}

ZqVector vec_neg(const ZqVector& a) {
  ZqVector out(a.size(), a.modulus());
  for (size_t i = 0; i < a.size(); ++i) out.set(i, a.modulus().neg(a[i]));
  return out;
}

ZqVector vec_scale(const ZqVector& a, uint64_t c) {
  if (c >= a.modulus().value()) throw std::invalid_argument("vec_scale: scalar out of range");
  ZqVector out(a.size(), a.modulus());
  for (size_t i = 0; i < a.size(); ++i) out.set(i, a.modulus().mul(a[i], c));
  return out;
}

Residue inner_product(const ZqVector& a, const ZqVector& b) {
  check_same(a.modulus(), b.modulus());
  if (a.size() != b.size()) throw std::invalid_argument("inner_product: length mismatch");
  const uint64_t q = a.modulus().value();
  // Each product is < 2^126; reduce per term, then the running sum stays far
  // below 2^127 for any realistic length.
  unsigned __int128 acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<unsigned __int128>(a[i]) * b[i] % q;
  }
  return Residue(static_cast<uint64_t>(acc % q), a.modulus());
}

ZqVector mat_vec_mul(const ZqMatrix& A, const ZqVector& x) {
  check_same(A.modulus(), x.modulus());
  if (A.cols() != x.size()) throw std::invalid_argument("mat_vec_mul: shape mismatch");
  const uint64_t q = A.modulus().value();
  ZqVector out(A.rows(), A.modulus());
  for (size_t r = 0; r < A.rows(); ++r) {
    unsigned __int128 acc = 0;
    for (size_t c = 0; c < A.cols(); ++c) {
      acc += static_cast<unsigned __int128>(A(r, c)) * x[c] % q;
    }
    out.set(r, static_cast<uint64_t>(acc % q));
  }
  return out;
}

ZqMatrix mat_mul(const ZqMatrix& A, const ZqMatrix& B) {
  check_same(A.modulus(), B.modulus());
  if (A.cols() != B.rows()) throw std::invalid_argument("mat_mul: shape mismatch");
  const uint64_t q = A.modulus().value();
  ZqMatrix out(A.rows(), B.cols(), A.modulus());
  for (size_t r = 0; r < A.rows(); ++r) {
    for (size_t c = 0; c < B.cols(); ++c) {
      unsigned __int128 acc = 0;
      for (size_t k = 0; k < A.cols(); ++k) {
        acc += static_cast<unsigned __int128>(A(r, k)) * B(k, c) % q;
      }
      out.set(r, c, static_cast<uint64_t>(acc % q));
    }
  }
  return out;
}

int64_t norm_inf_central(const ZqVector& a) {
  int64_t best = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t v = lift_central(a[i], a.modulus());
    if (v < 0) v = -v;
    if (v > best) best = v;
  }
  return best;
}

Residue sample_uniform_residue(const Modulus& q, RandomStream& rng) {
  return Residue(rng.next_below(q.value()), q);
}

ZqVector sample_uniform_vector(size_t len, const Modulus& q, RandomStream& rng) {
  ZqVector out(len, q);
  for (size_t i = 0; i < len; ++i) out.set(i, rng.next_below(q.value()));
  return out;
}

ZqMatrix sample_uniform_matrix(size_t rows, size_t cols, const Modulus& q, RandomStream& rng) {
  ZqMatrix out(rows, cols, q);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) out.set(r, c, rng.next_below(q.value()));
  return out;
}

namespace {

constexpr char kMagic[4] = {'Z', 'Q', 'V', '1'};

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : b_(bytes) {}
  void expect_magic() {
    if (b_.size() < 4 || std::memcmp(b_.data(), kMagic, 4) != 0)
      throw std::runtime_error("deserialize: bad magic");
    pos_ = 4;
  }
  uint64_t u64() {
    if (pos_ + 8 > b_.size()) throw std::runtime_error("deserialize: truncated input");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  void expect_end() const {
    if (pos_ != b_.size()) throw std::runtime_error("deserialize: trailing bytes");
  }

 private:
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> serialize_vector(const ZqVector& v) {
  std::vector<uint8_t> out;
  out.reserve(4 + 8 * (2 + v.size()));
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u64(out, v.modulus().value());
  put_u64(out, v.size());
  for (size_t i = 0; i < v.size(); ++i) put_u64(out, v[i]);
  return out;
}

ZqVector deserialize_vector(std::span<const uint8_t> bytes, size_t expected_len, const Modulus& expected_q) {
  ByteReader in(bytes);
  in.expect_magic();
  if (in.u64() != expected_q.value()) throw std::runtime_error("deserialize_vector: modulus mismatch");
  if (in.u64() != expected_len) throw std::runtime_error("deserialize_vector: length mismatch");
  ZqVector out(expected_len, expected_q);
  for (size_t i = 0; i < expected_len; ++i) {
    uint64_t v = in.u64();
    if (v >= expected_q.value()) throw std::runtime_error("deserialize_vector: residue out of range");
    out.set(i, v);
  }
  in.expect_end();
  return out;
}

std::vector<uint8_t> serialize_matrix(const ZqMatrix& m) {
  std::vector<uint8_t> out;
  out.reserve(4 + 8 * (3 + m.rows() * m.cols()));
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u64(out, m.modulus().value());
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c) put_u64(out, m(r, c));
  return out;
}

ZqMatrix deserialize_matrix(std::span<const uint8_t> bytes, size_t expected_rows, size_t expected_cols,
                            const Modulus& expected_q) {
  ByteReader in(bytes);
  in.expect_magic();
  if (in.u64() != expected_q.value()) throw std::runtime_error("deserialize_matrix: modulus mismatch");
  if (in.u64() != expected_rows || in.u64() != expected_cols)
    throw std::runtime_error("deserialize_matrix: shape mismatch");
  ZqMatrix out(expected_rows, expected_cols, expected_q);
  for (size_t r = 0; r < expected_rows; ++r) {
    for (size_t c = 0; c < expected_cols; ++c) {
      uint64_t v = in.u64();
      if (v >= expected_q.value()) throw std::runtime_error("deserialize_matrix: residue out of range");
      out.set(r, c, v);
    }
  }
  in.expect_end();
  return out;
}

}  // namespace skpsa
