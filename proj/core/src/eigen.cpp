// Hecke eigenforms of level 1. The eigen-coordinates come from an exact
// characteristic polynomial over a short basis; long expansions are exact
// integers rebuilt by CRT from NTT products modulo word-size primes, and only
// prime-power coefficients are reconstructed, the rest following from
// multiplicativity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "rsmoment/error.hpp"
#include "rsmoment/modforms.hpp"
#include "rsmoment/ntt.hpp"

namespace rsm {

namespace {

using Poly = std::vector<Mpfr>;  // low to high degree

Mpfr peval(const Poly& p, const Mpfr& x) {
  Mpfr r = p.back();
  for (size_t i = p.size() - 1; i-- > 0;) r = r * x + p[i];
  return r;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Mpfr(double(i), p[i].prec()));
  return d;
}

// Roots of a real-rooted polynomial with simple roots inside (-R, R), by
// bisection between consecutive roots of its derivative. Returns false when
// an interval has no sign change (numerically repeated root).
bool real_roots(const Poly& p, const Mpfr& R, std::vector<Mpfr>& out) {
  mpfr_prec_t prec = p[0].prec();
  out.clear();
  if (p.size() == 2) {
    out.push_back(-(p[0] / p[1]));
    return true;
  }
  std::vector<Mpfr> crit;
  if (!real_roots(derivative(p), R, crit)) return false;
  std::vector<Mpfr> ends;
  ends.push_back(-R);
  for (auto& c : crit) ends.push_back(c);
  ends.push_back(R);
  long iters = prec + static_cast<long>(std::log2(R.to_double() + 2)) + 8;
  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    Mpfr a = ends[i], b = ends[i + 1];
    Mpfr fa = peval(p, a), fb = peval(p, b);
    if (fa.is_zero()) {
      out.push_back(a);
      continue;
    }
    if (fb.is_zero()) {
      out.push_back(b);
      continue;
    }
    if (fa.sign() == fb.sign()) return false;
    Mpfr half(0.5, prec);
    for (long it = 0; it < iters; ++it) {
      Mpfr mid = (a + b) * half;
      Mpfr fm = peval(p, mid);
      if (fm.is_zero()) {
        a = b = mid;
        break;
      }
      if (fm.sign() == fa.sign()) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    out.push_back((a + b) * half);
  }
  return true;
}

// Faddeev-LeVerrier: monic characteristic polynomial, low to high.
std::vector<BigRat> charpoly(const std::vector<std::vector<BigRat>>& A) {
  size_t d = A.size();
  std::vector<BigRat> c(d + 1, BigRat(0));
  c[d] = 1;
  std::vector<std::vector<BigRat>> Mk(d, std::vector<BigRat>(d, BigRat(0)));
  for (size_t k = 1; k <= d; ++k) {
    // M_k = A M_{k-1} + c_{d-k+1} I
    std::vector<std::vector<BigRat>> N(d, std::vector<BigRat>(d, BigRat(0)));
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        BigRat s = 0;
        for (size_t l = 0; l < d; ++l) s += A[i][l] * Mk[l][j];
        N[i][j] = s;
      }
    for (size_t i = 0; i < d; ++i) N[i][i] += c[d - k + 1];
    Mk = std::move(N);
    BigRat tr = 0;
    for (size_t i = 0; i < d; ++i)
      for (size_t l = 0; l < d; ++l) tr += A[i][l] * Mk[l][i];
    c[d - k] = -tr / BigRat(long(k));
  }
  return c;
}

// Null vector of (A^T - lambda I) with first coordinate 1, by full pivoting.
std::vector<Mpfr> eigenvector(const std::vector<std::vector<BigRat>>& A, const Mpfr& lambda) {
  size_t d = A.size();
  mpfr_prec_t prec = lambda.prec();
  std::vector<std::vector<Mpfr>> B(d, std::vector<Mpfr>(d, Mpfr(prec)));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      B[i][j] = Mpfr(A[j][i], prec);
      if (i == j) B[i][j] -= lambda;
    }
  std::vector<size_t> col(d);
  for (size_t j = 0; j < d; ++j) col[j] = j;
  for (size_t s = 0; s + 1 < d; ++s) {
    size_t pi = s, pj = s;
    Mpfr best = abs(B[s][s]);
    for (size_t i = s; i < d; ++i)
      for (size_t j = s; j < d; ++j) {
        Mpfr v = abs(B[i][j]);
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best.is_zero()) throw Error("cannot separate eigenforms");
    std::swap(B[s], B[pi]);
    if (pj != s) {
      for (size_t i = 0; i < d; ++i) std::swap(B[i][s], B[i][pj]);
      std::swap(col[s], col[pj]);
    }
    for (size_t i = s + 1; i < d; ++i) {
      Mpfr f = B[i][s] / B[s][s];
      for (size_t j = s; j < d; ++j) B[i][j] -= f * B[s][j];
    }
  }
  std::vector<Mpfr> y(d, Mpfr(prec));
  y[d - 1] = Mpfr(1.0, prec);
  for (size_t s = d - 1; s-- > 0;) {
    Mpfr acc(prec);
    for (size_t j = s + 1; j < d; ++j) acc += B[s][j] * y[j];
    y[s] = -(acc / B[s][s]);
  }
  std::vector<Mpfr> x(d, Mpfr(prec));
  for (size_t j = 0; j < d; ++j) x[col[j]] = y[j];
  if (x[0].is_zero()) throw Error("eigenvector has vanishing first coefficient");
  Mpfr x0 = x[0];
  for (auto& v : x) v /= x0;
  return x;
}

// Inverse of a small dense matrix in double (Gauss-Jordan, partial pivoting).
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> X) {
  size_t d = X.size();
  std::vector<std::vector<double>> I(d, std::vector<double>(d, 0.0));
  for (size_t i = 0; i < d; ++i) I[i][i] = 1;
  for (size_t c = 0; c < d; ++c) {
    size_t p = c;
    for (size_t r = c + 1; r < d; ++r)
      if (std::fabs(X[r][c]) > std::fabs(X[p][c])) p = r;
    if (X[p][c] == 0) throw Error("singular eigenvector matrix");
    std::swap(X[c], X[p]);
    std::swap(I[c], I[p]);
    double piv = X[c][c];
    for (size_t j = 0; j < d; ++j) {
      X[c][j] /= piv;
      I[c][j] /= piv;
    }
    for (size_t r = 0; r < d; ++r) {
      if (r == c || X[r][c] == 0) continue;
      double f = X[r][c];
      for (size_t j = 0; j < d; ++j) {
        X[r][j] -= f * X[c][j];
        I[r][j] -= f * I[c][j];
      }
    }
  }
  return I;
}

struct WeightData {
  int k = 0;
  int d = 0;
  std::vector<QExpansion> small;               // Delta^j E_{k-12j} to a short length
  std::vector<std::vector<Mpfr>> x;            // eigen coordinates, one row per form
  std::vector<double> a2;
  double log2_basis_bound = 0;  // log2 max_j sum_f |X^{-1}_{jf}|
  mpfr_prec_t prec = 256;
};

WeightData small_phase(int k, mpfr_prec_t prec) {
  WeightData w;
  w.k = k;
  w.d = cusp_dimension(k);
  if (w.d == 0) throw Error("empty space");
  const size_t d = w.d;
  const size_t L = 5 * d + 2;
  w.small = delta_power_basis(k, L);
  for (;;) {
    w.prec = prec;
    bool separated = false;
    for (unsigned long ell : {2ul, 3ul, 5ul}) {
      std::vector<std::vector<BigRat>> A(d, std::vector<BigRat>(d, BigRat(0)));
      for (size_t j = 0; j < d; ++j) {
        QExpansion t = hecke_apply(ell, w.small[j], d);
        std::vector<BigInt> y(d + 1, BigInt(0));
        for (size_t m = 1; m <= d; ++m) {
          BigInt v = t.coeffs[m];
          for (size_t i = 1; i < m; ++i) v -= y[i] * w.small[i - 1].coeffs[m];
          y[m] = v;
        }
        for (size_t i = 0; i < d; ++i) A[j][i] = BigRat(y[i + 1]);
      }
      auto cp = charpoly(A);
      mpfr_prec_t rp = prec + 64;
      Poly p;
      for (auto& c : cp) p.emplace_back(c, rp);
      Mpfr R(1.0, rp);
      Mpfr mx(0.0, rp);
      for (size_t i = 0; i < d; ++i)
        if (abs(p[i]) > mx) mx = abs(p[i]);
      R += mx;
      std::vector<Mpfr> roots;
      if (!real_roots(p, R, roots)) continue;
      std::sort(roots.begin(), roots.end(), [](const Mpfr& a, const Mpfr& b) { return a < b; });
      double scale = 2.0 * std::pow(double(ell), 0.5 * (k - 1));
      bool ok = true;
      for (size_t i = 0; i + 1 < roots.size(); ++i)
        if ((roots[i + 1] - roots[i]).to_double() < 1e-6 * scale) ok = false;
      if (!ok) continue;
      w.x.clear();
      for (auto& r : roots) w.x.push_back(eigenvector(A, r));
      separated = true;
      break;
    }
    if (!separated) throw Error("cannot separate eigenforms");

    // a_f(2) for ordering, and the bound on the basis in terms of eigenforms
    std::vector<std::pair<double, size_t>> order;
    for (size_t f = 0; f < d; ++f) {
      Mpfr a2(prec);
      for (size_t j = 0; j < d; ++j) a2 += w.x[f][j] * Mpfr(w.small[j].coeffs[2], prec);
      order.push_back({a2.to_double(), f});
    }
    std::sort(order.begin(), order.end());
    std::vector<std::vector<Mpfr>> xs;
    w.a2.clear();
    for (auto& [a2, f] : order) {
      xs.push_back(w.x[f]);
      w.a2.push_back(a2);
    }
    w.x = std::move(xs);
    std::vector<std::vector<double>> X(d, std::vector<double>(d));
    for (size_t f = 0; f < d; ++f)
      for (size_t j = 0; j < d; ++j) X[f][j] = w.x[f][j].to_double();
    auto Xi = invert(X);
    double worst = 0, cancel = 0;
    for (size_t j = 0; j < d; ++j) {
      double s = 0;
      for (size_t f = 0; f < d; ++f) s += std::fabs(Xi[j][f]);
      worst = std::max(worst, s);
    }
    for (size_t f = 0; f < d; ++f) {
      double s = 0;
      for (size_t j = 0; j < d; ++j) {
        double sj = 0;
        for (size_t g = 0; g < d; ++g) sj += std::fabs(Xi[j][g]);
        s += std::fabs(X[f][j]) * sj;
      }
      cancel = std::max(cancel, s);
    }
    w.log2_basis_bound = std::log2(worst) + 2;  // 2 bits for rounding in X^{-1}
    // bits lost when forming sum_j x_j B_j(m) relative to m^((k-1)/2)
    mpfr_prec_t need = 96 + static_cast<mpfr_prec_t>(std::log2(cancel + 1) + 24);
    if (need <= prec) return w;
    prec = need + 64;
  }
}

std::vector<size_t> prime_powers_upto(size_t M, std::vector<uint32_t>& spf) {
  spf.assign(M + 1, 0);
  for (size_t i = 2; i <= M; ++i)
    if (!spf[i])
      for (size_t j = i; j <= M; j += i)
        if (!spf[j]) spf[j] = static_cast<uint32_t>(i);
  std::vector<size_t> pp;
  for (size_t m = 2; m <= M; ++m) {
    size_t p = spf[m], r = m;
    while (r % p == 0) r /= p;
    if (r == 1) pp.push_back(m);
  }
  return pp;
}

}  // namespace

std::vector<std::vector<Eigenform>> eigenforms_batch(const std::vector<int>& weights, size_t M,
                                                     const PrecisionContext& ctx) {
  ctx.validate();
  if (M < 2) throw Error("eigenform length must be at least 2");
  std::vector<WeightData> wd;
  for (int k : weights) wd.push_back(small_phase(k, ctx.working_bits));

  std::vector<uint32_t> spf;
  std::vector<size_t> pp = prime_powers_upto(M, spf);
  const size_t npp = pp.size();

  double max_bits = 0;
  for (auto& w : wd) {
    double bits = w.log2_basis_bound + std::log2(std::log2(double(M)) + 1) +
                  0.5 * (w.k - 1) * std::log2(double(M)) + 8;
    max_bits = std::max(max_bits, bits);
  }
  int log_len = 1;
  while ((size_t(1) << log_len) < 2 * M + 1) ++log_len;
  size_t nrec = static_cast<size_t>(std::ceil(max_bits / 30.0)) + 1;
  auto primes = ntt_primes(log_len, nrec + 1);
  const uint32_t pcheck = primes.back();
  const size_t np = primes.size();

  // sigma_3 and sigma_5 once; sigma_5(M) < 2^128 for the lengths in use
  std::vector<uint64_t> s3(M + 1, 0);
  std::vector<unsigned __int128> s5(M + 1, 0);
  for (size_t d = 1; d <= M; ++d) {
    uint64_t d3 = uint64_t(d) * d * d;
    unsigned __int128 d5 = static_cast<unsigned __int128>(d3) * d * d;
    for (size_t m = d; m <= M; m += d) {
      s3[m] += d3;
      s5[m] += d5;
    }
  }

  // residues[w][j][pp * np + prime]
  std::vector<std::vector<std::vector<uint32_t>>> res(wd.size());
  for (size_t a = 0; a < wd.size(); ++a)
    res[a].assign(wd[a].d, std::vector<uint32_t>(npp * np, 0));
  int dmax = 0;
  for (auto& w : wd) dmax = std::max(dmax, w.d);

  for (size_t pi = 0; pi < np; ++pi) {
    const uint32_t p = primes[pi];
    Ntt ntt(p, log_len);
    const auto& mf = ntt.field();
    std::vector<uint32_t> e4(M + 1), e6(M + 1);
    uint32_t c240 = mf.to_mont(240), c504 = mf.to_mont(504);
    e4[0] = e6[0] = mf.one();
    for (size_t m = 1; m <= M; ++m) {
      e4[m] = mf.mul(c240, mf.to_mont(static_cast<uint32_t>(s3[m] % p)));
      e6[m] = mf.sub(0, mf.mul(c504, mf.to_mont(static_cast<uint32_t>(s5[m] % p))));
    }
    // Products go through cached transforms; each series has length M + 1
    // and the transform length is at least 2M + 1.
    const auto fe4 = ntt.transform(e4), fe6 = ntt.transform(e6);
    auto e4sq = ntt.multiply_transformed(fe4, fe4, M + 1);
    auto e4cu = ntt.multiply_transformed(ntt.transform(e4sq), fe4, M + 1);
    auto e6sq = ntt.multiply_transformed(fe6, fe6, M + 1);
    std::vector<uint32_t> delta(M + 1);
    uint32_t inv1728 = mf.to_mont(mod_inv(1728 % p, p));
    for (size_t m = 0; m <= M; ++m) delta[m] = mf.mul(mf.sub(e4cu[m], e6sq[m]), inv1728);
    e4cu = {};
    e6sq = {};

    std::map<int, std::vector<uint32_t>> feis;  // transforms of E_w
    feis[4] = fe4;
    feis[6] = fe6;
    std::function<const std::vector<uint32_t>&(int)> eisenstein =
        [&](int w) -> const std::vector<uint32_t>& {
      auto it = feis.find(w);
      if (it != feis.end()) return it->second;
      if (w < 8 || w % 2) throw Error("no Eisenstein product of weight " + std::to_string(w));
      auto v = ntt.transform(ntt.multiply_transformed(eisenstein(w - 4), fe4, M + 1));
      return feis.emplace(w, std::move(v)).first->second;
    };
    std::vector<std::vector<uint32_t>> fdpow(dmax + 1);
    std::vector<uint32_t> dj = delta;
    for (int j = 1; j <= dmax; ++j) {
      if (j > 1) dj = ntt.multiply_transformed(fdpow[j - 1], fdpow[1], M + 1);
      fdpow[j] = ntt.transform(dj);
    }
    dj = {};

    for (size_t a = 0; a < wd.size(); ++a) {
      for (int j = 1; j <= wd[a].d; ++j) {
        int w = wd[a].k - 12 * j;
        std::vector<uint32_t> prod;
        if (w == 0) {
          prod = fdpow[j];
          ntt.inverse(prod);
        } else {
          prod = ntt.multiply_transformed(fdpow[j], eisenstein(w), M + 1);
        }
        const std::vector<uint32_t>* src = &prod;
        auto& out = res[a][j - 1];
        for (size_t i = 0; i < npp; ++i) out[i * np + pi] = mf.from_mont((*src)[pp[i]]);
      }
    }
  }

  CrtBasis crt(std::vector<uint32_t>(primes.begin(), primes.end() - 1));
  std::vector<std::vector<Eigenform>> out(wd.size());
  for (size_t a = 0; a < wd.size(); ++a) {
    const WeightData& w = wd[a];
    const size_t d = w.d;
    const mpfr_prec_t prec = std::max<mpfr_prec_t>(w.prec, static_cast<mpfr_prec_t>(max_bits) + 64);
    std::vector<Eigenform> forms(d);
    for (size_t f = 0; f < d; ++f) {
      forms[f].weight = w.k;
      forms[f].C.assign(M + 1, 0.0);
      forms[f].C[1] = 1.0;
      forms[f].hecke_t2 = w.a2[f];
    }
    std::vector<std::vector<Mpfr>> xf(d);
    for (size_t f = 0; f < d; ++f)
      for (size_t j = 0; j < d; ++j) xf[f].push_back(Mpfr(w.x[f][j]));
    std::vector<Mpfr> B(d, Mpfr(prec));
    for (size_t i = 0; i < npp; ++i) {
      const size_t m = pp[i];
      for (size_t j = 0; j < d; ++j) {
        const uint32_t* r = &res[a][j][i * np];
        BigInt v = crt.reconstruct(r);
        BigInt rc = v % pcheck;
        if (rc < 0) rc += pcheck;
        if (rc != r[np - 1]) throw Error("multimodular reconstruction failed its check prime");
        if (m < w.small[j].coeffs.size() && v != w.small[j].coeffs[m])
          throw Error("multimodular engine disagrees with exact expansion");
        B[j] = Mpfr(v, prec);
      }
      Mpfr norm = half_integer_power(m, w.k - 1, prec);
      for (size_t f = 0; f < d; ++f) {
        Mpfr s(prec);
        for (size_t j = 0; j < d; ++j) s += xf[f][j] * B[j];
        forms[f].C[m] = (s / norm).to_double();
      }
    }
    for (auto& F : forms) {
      for (size_t m = 2; m <= M; ++m) {
        size_t p = spf[m], pe = 1;
        size_t r = m;
        while (r % p == 0) {
          r /= p;
          pe *= p;
        }
        if (r != 1) F.C[m] = F.C[pe] * F.C[r];
      }
    }
    out[a] = std::move(forms);
  }
  return out;
}

std::vector<Eigenform> eigenforms(int k, size_t M, const PrecisionContext& ctx) {
  return eigenforms_batch({k}, M, ctx).front();
}

}  // namespace rsm
