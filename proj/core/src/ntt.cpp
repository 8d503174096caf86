#include "rsmoment/ntt.hpp"

#include <algorithm>

#include "rsmoment/error.hpp"

namespace rsm {

uint32_t mod_pow(uint32_t a, uint64_t e, uint32_t p) {
  uint64_t r = 1, b = a % p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<uint32_t>(r);
}

uint32_t mod_inv(uint32_t a, uint32_t p) {
  if (a % p == 0) throw Error("modular inverse of zero");
  return mod_pow(a, p - 2, p);
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  uint64_t d = n - 1;
  int s = 0;
  while (!(d & 1)) {
    d >>= 1;
    ++s;
  }
  auto mulmod = [n](uint64_t a, uint64_t b) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % n);
  };
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = 1, b = a % n, e = d;
    while (e) {
      if (e & 1) x = mulmod(x, b);
      b = mulmod(b, b);
      e >>= 1;
    }
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

MontgomeryField::MontgomeryField(uint32_t p) : p_(p) {
  if (p < 3 || !(p & 1) || p >= (1u << 31)) throw Error("Montgomery modulus must be odd and < 2^31");
  // Newton iteration for p^{-1} mod 2^32.
  uint32_t inv = p;
  for (int i = 0; i < 5; ++i) inv *= 2 - p * inv;
  pneg_ = 0u - inv;
  r2_ = static_cast<uint32_t>((static_cast<unsigned __int128>(1) << 64) % p);
  one_ = static_cast<uint32_t>((uint64_t(1) << 32) % p);
}

uint32_t MontgomeryField::pow(uint32_t b, uint64_t e) const {
  uint32_t r = one_;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

namespace {

uint32_t primitive_root(uint32_t p) {
  std::vector<uint32_t> qs;
  uint32_t m = p - 1;
  for (uint32_t q = 2; q * q <= m; ++q) {
    if (m % q == 0) {
      qs.push_back(q);
      while (m % q == 0) m /= q;
    }
  }
  if (m > 1) qs.push_back(m);
  for (uint32_t g = 2;; ++g) {
    bool ok = true;
    for (uint32_t q : qs)
      if (mod_pow(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
}

}  // namespace

Ntt::Ntt(uint32_t p, int log_len) : mf_(p), n_(size_t(1) << log_len) {
  if ((p - 1) % n_ != 0) throw Error("NTT length does not divide p - 1");
  uint32_t g = primitive_root(p);
  uint32_t w = mf_.to_mont(mod_pow(g, (p - 1) / n_, p));
  uint32_t wi = mf_.to_mont(mod_inv(mod_pow(g, (p - 1) / n_, p), p));
  rt_.assign(n_, 0);
  irt_.assign(n_, 0);
  // level with half-length len uses the primitive (2 len)-th root w^(n / 2len)
  for (size_t len = 1; len < n_; len <<= 1) {
    uint32_t step = mf_.pow(w, n_ / (2 * len));
    uint32_t istep = mf_.pow(wi, n_ / (2 * len));
    uint32_t cur = mf_.one(), icur = mf_.one();
    for (size_t j = 0; j < len; ++j) {
      rt_[len + j] = cur;
      irt_[len + j] = icur;
      cur = mf_.mul(cur, step);
      icur = mf_.mul(icur, istep);
    }
  }
  ninv_ = mf_.to_mont(mod_inv(static_cast<uint32_t>(n_ % p), p));
}

void Ntt::forward(std::vector<uint32_t>& a) const {
  if (a.size() != n_) throw Error("NTT size mismatch");
  for (size_t len = n_ >> 1; len >= 1; len >>= 1) {
    for (size_t i = 0; i < n_; i += 2 * len) {
      for (size_t j = 0; j < len; ++j) {
        uint32_t u = a[i + j], v = a[i + j + len];
        a[i + j] = mf_.add(u, v);
        a[i + j + len] = mf_.mul(mf_.sub(u, v), rt_[len + j]);
      }
    }
  }
}

void Ntt::inverse(std::vector<uint32_t>& a) const {
  if (a.size() != n_) throw Error("NTT size mismatch");
  for (size_t len = 1; len < n_; len <<= 1) {
    for (size_t i = 0; i < n_; i += 2 * len) {
      for (size_t j = 0; j < len; ++j) {
        uint32_t u = a[i + j], v = mf_.mul(a[i + j + len], irt_[len + j]);
        a[i + j] = mf_.add(u, v);
        a[i + j + len] = mf_.sub(u, v);
      }
    }
  }
  for (auto& x : a) x = mf_.mul(x, ninv_);
}

std::vector<uint32_t> Ntt::multiply(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                                    size_t out_len) const {
  size_t la = std::min(a.size(), out_len), lb = std::min(b.size(), out_len);
  if (la + lb - 1 > n_) throw Error("NTT length too small for product");
  std::vector<uint32_t> fa(n_, 0), fb(n_, 0);
  std::copy_n(a.begin(), la, fa.begin());
  std::copy_n(b.begin(), lb, fb.begin());
  forward(fa);
  forward(fb);
  for (size_t i = 0; i < n_; ++i) fa[i] = mf_.mul(fa[i], fb[i]);
  inverse(fa);
  fa.resize(out_len);
  return fa;
}

std::vector<uint32_t> Ntt::transform(const std::vector<uint32_t>& a) const {
  if (2 * a.size() > n_ + 1) throw Error("NTT length too small for product");
  std::vector<uint32_t> f(n_, 0);
  std::copy(a.begin(), a.end(), f.begin());
  forward(f);
  return f;
}

std::vector<uint32_t> Ntt::multiply_transformed(const std::vector<uint32_t>& fa,
                                                const std::vector<uint32_t>& fb,
                                                size_t out_len) const {
  std::vector<uint32_t> c(n_);
  for (size_t i = 0; i < n_; ++i) c[i] = mf_.mul(fa[i], fb[i]);
  inverse(c);
  c.resize(out_len);
  return c;
}

std::vector<uint32_t> ntt_primes(int min_log, size_t count) {
  std::vector<uint32_t> out;
  if (min_log > 30) throw Error("NTT length exceeds 31-bit prime range");
  const uint64_t step = uint64_t(1) << min_log;
  for (uint64_t c = ((uint64_t(1) << 31) - 2) / step; c >= 1 && out.size() < count; --c) {
    uint64_t p = c * step + 1;
    if (p < (uint64_t(1) << 31) && is_prime_u64(p)) out.push_back(static_cast<uint32_t>(p));
  }
  if (out.size() < count) throw Error("not enough NTT primes for the requested length");
  return out;
}

CrtBasis::CrtBasis(std::vector<uint32_t> primes) : primes_(std::move(primes)) {
  size_t t = primes_.size();
  prefix_mod_.assign(t, {});
  inv_prefix_.assign(t, 1);
  radix_.assign(t, BigInt(1));
  BigInt P = 1;
  for (size_t i = 0; i < t; ++i) {
    uint32_t pi = primes_[i];
    prefix_mod_[i].assign(i, 0);
    uint64_t m = 1;
    for (size_t j = 0; j < i; ++j) {
      prefix_mod_[i][j] = static_cast<uint32_t>(m);  // prod_{l<j} p_l mod p_i
      m = m * (primes_[j] % pi) % pi;
    }
    inv_prefix_[i] = i == 0 ? 1 : mod_inv(static_cast<uint32_t>(m), pi);
    radix_[i] = P;
    P *= pi;
  }
  product_ = P;
  half_ = P / 2;
}

BigInt CrtBasis::reconstruct(const uint32_t* r) const {
  size_t t = primes_.size();
  std::vector<uint32_t> v(t);
  for (size_t i = 0; i < t; ++i) {
    uint64_t pi = primes_[i];
    uint64_t acc = 0;
    for (size_t j = 0; j < i; ++j) acc = (acc + uint64_t(v[j]) * prefix_mod_[i][j]) % pi;
    uint64_t d = (r[i] % pi + pi - acc) % pi;
    v[i] = static_cast<uint32_t>(d * inv_prefix_[i] % pi);
  }
  BigInt x = 0;
  for (size_t i = t; i-- > 0;) {
    x *= primes_[i];
    x += v[i];
  }
  if (x > half_) x -= product_;
  return x;
}

}  // namespace rsm
