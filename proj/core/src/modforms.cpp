#include "rsmoment/modforms.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rsmoment/error.hpp"

namespace rsm {

int cusp_dimension(int k) {
  if (k < 4 || k % 2) return 0;
  int dim_m = k / 12 + (k % 12 == 2 ? 0 : 1);
  return dim_m - 1;
}

long divisor_count(unsigned long n) {
  long c = 1;
  for (unsigned long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    long e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    c *= e + 1;
  }
  if (n > 1) c *= 2;
  return c;
}

namespace {

std::vector<BigInt> mul_trunc(const std::vector<BigInt>& a, const std::vector<BigInt>& b, size_t len) {
  std::vector<BigInt> c(len, BigInt(0));
  for (size_t i = 0; i < len && i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; i + j < len && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

std::vector<BigInt> sigma_series(int power, long scale, size_t M) {
  std::vector<BigInt> s(M + 1, BigInt(0));
  for (size_t d = 1; d <= M; ++d) {
    BigInt dp = boost::multiprecision::pow(BigInt(d), power);
    for (size_t m = d; m <= M; m += d) s[m] += dp;
  }
  for (size_t m = 1; m <= M; ++m) s[m] *= scale;
  s[0] = 1;
  return s;
}

// E4^a E6^b with 4a + 6b = w, using at most one factor E6.
std::vector<BigInt> eisenstein_product(int w, size_t M) {
  std::vector<BigInt> r(M + 1, BigInt(0));
  r[0] = 1;
  if (w == 0) return r;
  if (w < 4 || w % 2) throw Error("no Eisenstein product of weight " + std::to_string(w));
  if (w % 4 == 2) {
    r = sigma_series(5, -504, M);
    w -= 6;
  }
  if (w > 0) {
    auto e4 = sigma_series(3, 240, M);
    for (; w > 0; w -= 4) r = mul_trunc(r, e4, M + 1);
  }
  return r;
}

}  // namespace

QExpansion eisenstein_series(int k, size_t M) {
  if (k == 4) return {4, sigma_series(3, 240, M)};
  if (k == 6) return {6, sigma_series(5, -504, M)};
  throw Error("eisenstein_series supports k = 4, 6");
}

QExpansion delta_series(size_t M) {
  auto e4 = sigma_series(3, 240, M);
  auto e6 = sigma_series(5, -504, M);
  auto e4c = mul_trunc(mul_trunc(e4, e4, M + 1), e4, M + 1);
  auto e6s = mul_trunc(e6, e6, M + 1);
  QExpansion d{12, std::vector<BigInt>(M + 1, BigInt(0))};
  for (size_t m = 0; m <= M; ++m) d.coeffs[m] = (e4c[m] - e6s[m]) / 1728;
  return d;
}

std::vector<QExpansion> delta_power_basis(int k, size_t M) {
  int d = cusp_dimension(k);
  if (d == 0) throw Error("empty space");
  if (M < size_t(d)) throw Error("length underflow");
  auto delta = delta_series(M).coeffs;
  std::vector<QExpansion> out;
  std::vector<BigInt> dp = delta;
  for (int j = 1; j <= d; ++j) {
    if (j > 1) dp = mul_trunc(dp, delta, M + 1);
    out.push_back({k, mul_trunc(dp, eisenstein_product(k - 12 * j, M), M + 1)});
  }
  return out;
}

std::vector<QExpansion> miller_basis(int k, size_t M) {
  auto b = delta_power_basis(k, M);
  int d = static_cast<int>(b.size());
  // b[j] starts q^(j+1) + ...; clear the entries above the diagonal
  for (int j = d - 1; j >= 0; --j)
    for (int i = 0; i < j; ++i) {
      BigInt f = b[i].coeffs[j + 1];
      if (f == 0) continue;
      for (size_t m = 0; m <= M; ++m) b[i].coeffs[m] -= f * b[j].coeffs[m];
    }
  return b;
}

QExpansion hecke_apply(unsigned long m, const QExpansion& f, size_t out_len) {
  if (m == 0) throw Error("Hecke index must be positive");
  if (f.length() < m * out_len) throw Error("length underflow");
  QExpansion g{f.weight, std::vector<BigInt>(out_len + 1, BigInt(0))};
  for (size_t n = 0; n <= out_len; ++n) {
    BigInt s = 0;
    for (unsigned long d = 1; d <= m; ++d) {
      if (m % d) continue;
      if (n == 0) {
        s += boost::multiprecision::pow(BigInt(d), f.weight - 1) * f.coeffs[0];
        continue;
      }
      if (n % d) continue;
      s += boost::multiprecision::pow(BigInt(d), f.weight - 1) * f.coeffs[m * n / (d * d)];
    }
    g.coeffs[n] = s;
  }
  return g;
}

double Eigenform::a(size_t m) const {
  return C.at(m) * std::pow(double(m), 0.5 * (weight - 1));
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Neumaier-compensated complex accumulator.
struct Accumulator {
  double re = 0, im = 0, cre = 0, cim = 0, abs_sum = 0, err = 0;
  static void add1(double& s, double& c, double x) {
    double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void add(std::complex<double> t, double rel_err) {
    add1(re, cre, t.real());
    add1(im, cim, t.imag());
    double a = std::abs(t);
    abs_sum += a;
    err += rel_err * a;
  }
};

Evaluation finish(Accumulator& acc, int k, size_t M, double y, double coeff_bound, double tol) {
  Evaluation out;
  out.value = {acc.re + acc.cre, acc.im + acc.cim};
  // tail sum_{m > M} coeff_bound * 2 sqrt(m) * m^((k-1)/2) e^(-2 pi y m)
  double m1 = double(M + 1);
  double rho = std::exp(0.5 * k * std::log1p(1.0 / m1) - 2 * kPi * y);
  double tail = INFINITY;
  if (rho < 1) {
    double lt = std::log(2.0 * coeff_bound) + 0.5 * k * std::log(m1) - 2 * kPi * y * m1;
    tail = std::exp(lt) / (1 - rho);
  }
  out.bound = tail + acc.err + 4 * kEps * acc.abs_sum;
  if (!(out.bound <= tol * std::max(1.0, std::abs(out.value))))
    throw UncertifiedError("truncation not certified", out.bound);
  return out;
}

std::complex<double> qpow_term(size_t m, std::complex<double> z, double log_mag) {
  // e^(2 pi i m x) with the phase reduced modulo 1 first
  double ph = std::fmod(z.real() * double(m), 1.0);
  return std::polar(std::exp(log_mag - 2 * kPi * z.imag() * double(m)), 2 * kPi * ph);
}

}  // namespace

Evaluation evaluate(const Eigenform& f, std::complex<double> z, double tol) {
  if (!(z.imag() > 0)) throw Error("evaluate requires Im z > 0");
  Accumulator acc;
  double az = std::abs(z);
  for (size_t m = 1; m <= f.length(); ++m) {
    if (f.C[m] == 0) continue;
    double lm = 0.5 * (f.weight - 1) * std::log(double(m));
    std::complex<double> t = f.C[m] * qpow_term(m, z, lm);
    acc.add(t, kEps * (2 * kPi * m * az + f.weight + 10 + 2 * std::log2(double(m))));
  }
  return finish(acc, f.weight, f.length(), z.imag(), 1.0, tol);
}

Evaluation evaluate(const QExpansion& f, std::complex<double> z, double coeff_bound, double tol) {
  if (!(z.imag() > 0)) throw Error("evaluate requires Im z > 0");
  if (!f.coeffs.empty() && f.coeffs[0] != 0) throw Error("evaluate expects a cusp form");
  Accumulator acc;
  double az = std::abs(z);
  for (size_t m = 1; m <= f.length(); ++m) {
    if (f.coeffs[m] == 0) continue;
    double a = f.coeffs[m].convert_to<double>();
    double lm = std::log(std::fabs(a));
    std::complex<double> t = (a < 0 ? -1.0 : 1.0) * qpow_term(m, z, lm);
    acc.add(t, kEps * (2 * kPi * m * az + 10));
  }
  return finish(acc, f.weight, f.length(), z.imag(), coeff_bound, tol);
}

NewformRecord newform_from_eigenform(const Eigenform& f) {
  NewformRecord g;
  g.weight = f.weight;
  g.level = 1;
  g.C = f.C;
  return g;
}

NewformRecord load_newform(const std::string& path, size_t min_count) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open newform file '" + path + "'");
  NewformRecord g;
  std::string line, key;
  size_t count = 0;
  auto header = [&](const char* want, auto& value) {
    if (!std::getline(in, line)) throw Error("parse error: missing '" + std::string(want) + "' line");
    std::istringstream is(line);
    if (!(is >> key >> value) || key != want)
      throw Error("parse error: expected '" + std::string(want) + " <value>', got '" + line + "'");
  };
  header("weight", g.weight);
  header("level", g.level);
  header("count", count);
  if (g.weight < 2 || g.weight % 2 || g.level < 1) throw Error("parse error: bad weight or level");
  g.C.assign(count + 1, 0.0);
  for (size_t i = 1; i <= count; ++i) {
    if (!std::getline(in, line)) throw Error("parse error: expected " + std::to_string(count) + " coefficients");
    std::istringstream is(line);
    size_t m;
    double c;
    if (!(is >> m >> c) || m != i)
      throw Error("parse error at coefficient line " + std::to_string(i));
    g.C[m] = c;
  }
  if (count < 1 || std::fabs(g.C[1] - 1.0) > 1e-12) throw Error("not normalized");
  if (count < min_count)
    throw Error("too few coefficients: have " + std::to_string(count) + ", need " +
                std::to_string(min_count));
  std::vector<int> ndiv(count + 1, 0);
  for (size_t d = 1; d <= count; ++d)
    for (size_t m = d; m <= count; m += d) ++ndiv[m];
  for (size_t m = 2; m <= count; ++m) {
    if (std::gcd(long(m), g.level) != 1) continue;
    if (std::fabs(g.C[m]) > ndiv[m] + 1e-9) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "Ramanujan violation at m = %zu: |C(m)| = %.6g", m, std::fabs(g.C[m]));
      g.warnings.emplace_back(buf);
    }
  }
  return g;
}

void write_newform(const std::string& path, const NewformRecord& g) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error("cannot write newform file '" + path + "'");
  std::fprintf(fp, "weight %d\nlevel %ld\ncount %zu\n", g.weight, g.level, g.length());
  for (size_t m = 1; m <= g.length(); ++m) std::fprintf(fp, "%zu %.17g\n", m, g.C[m]);
  std::fclose(fp);
}

}  // namespace rsm
