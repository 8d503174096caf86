#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rsmoment/mpfr.hpp"

namespace rsm {

// Arithmetic modulo an odd prime p < 2^31 in Montgomery form (R = 2^32).
class MontgomeryField {
 public:
  explicit MontgomeryField(uint32_t p);

  uint32_t modulus() const { return p_; }
  uint32_t reduce(uint64_t t) const {
    uint32_t m = static_cast<uint32_t>(t) * pneg_;
    uint32_t r = static_cast<uint32_t>((t + uint64_t(m) * p_) >> 32);
    return r >= p_ ? r - p_ : r;
  }
  uint32_t mul(uint32_t a, uint32_t b) const { return reduce(uint64_t(a) * b); }
  uint32_t add(uint32_t a, uint32_t b) const {
    uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
  uint32_t to_mont(uint32_t x) const { return mul(x % p_, r2_); }
  uint32_t from_mont(uint32_t x) const { return reduce(x); }
  uint32_t pow(uint32_t base_mont, uint64_t e) const;
  uint32_t one() const { return one_; }

 private:
  uint32_t p_, pneg_, r2_, one_;
};

// Plain modular helpers on residues in [0, p).
uint32_t mod_pow(uint32_t a, uint64_t e, uint32_t p);
uint32_t mod_inv(uint32_t a, uint32_t p);
bool is_prime_u64(uint64_t n);

// Number-theoretic transform modulo p = c*2^e + 1 for lengths up to 2^e.
class Ntt {
 public:
  Ntt(uint32_t p, int log_len);

  const MontgomeryField& field() const { return mf_; }
  size_t length() const { return n_; }
  // In place, Montgomery-form input; output in bit-reversed order.
  void forward(std::vector<uint32_t>& a) const;
  // Inverse of forward including the 1/n scaling.
  void inverse(std::vector<uint32_t>& a) const;
  // Truncated product of two Montgomery-form series, result length `out_len`.
  std::vector<uint32_t> multiply(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                                 size_t out_len) const;
  // Zero-padded forward transform of a series of length <= length()/2.
  std::vector<uint32_t> transform(const std::vector<uint32_t>& a) const;
  // Truncated product from two transforms produced by `transform`.
  std::vector<uint32_t> multiply_transformed(const std::vector<uint32_t>& fa,
                                             const std::vector<uint32_t>& fb, size_t out_len) const;

 private:
  MontgomeryField mf_;
  size_t n_;
  std::vector<uint32_t> rt_, irt_;  // rt_[len + j] = w_{2 len}^j
  uint32_t ninv_;
};

// The `count` largest primes below 2^31 of the form c*2^e + 1 with e >= min_log.
std::vector<uint32_t> ntt_primes(int min_log, size_t count);

// Chinese remaindering of residues (plain form, not Montgomery) into the
// symmetric range (-P/2, P/2].
class CrtBasis {
 public:
  explicit CrtBasis(std::vector<uint32_t> primes);
  size_t size() const { return primes_.size(); }
  const std::vector<uint32_t>& primes() const { return primes_; }
  BigInt reconstruct(const uint32_t* residues) const;

 private:
  std::vector<uint32_t> primes_;
  std::vector<std::vector<uint32_t>> prefix_mod_;  // prod_{j<i} p_j mod p_i in row i
  std::vector<uint32_t> inv_prefix_;
  std::vector<BigInt> radix_;
  BigInt product_, half_;
};

}  // namespace rsm
