#include "rsmoment/tracefmla.hpp"

#include <fftw3.h>

#include <cmath>
#include <numeric>

#include "rsmoment/specialfn.hpp"

namespace rsm {

namespace {

// Inverse of x modulo c; requires gcd(x, c) = 1.
long inverse_mod(long x, long c) {
  long r0 = c, r1 = x % c, s0 = 0, s1 = 1;
  while (r1) {
    long q = r0 / r1;
    long t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  return ((s0 % c) + c) % c;
}

long mod(long a, long c) { return ((a % c) + c) % c; }

}  // namespace

std::complex<double> kloosterman_q_complex(long m, long n, long c) {
  if (c < 1) throw Error("Kloosterman modulus must be positive");
  if (c == 1) return 1.0;
  const long mm = mod(m, c), nn = mod(n, c);
  double re = 0, im = 0;
  for (long x = 1; x < c; ++x) {
    if (std::gcd(x, c) != 1) continue;
    long xb = inverse_mod(x, c);
    long r = static_cast<long>((static_cast<__int128>(mm) * x + static_cast<__int128>(nn) * xb) % c);
    double a = 2 * kPi * double(r) / double(c);
    re += std::cos(a);
    im += std::sin(a);
  }
  return {re, im};
}

double kloosterman_q(long m, long n, long c) { return kloosterman_q_complex(m, n, c).real(); }

KloostermanTable::KloostermanTable(long p, long c) : c_(c), v_(static_cast<size_t>(c), 0.0) {
  if (c < 1) throw Error("Kloosterman modulus must be positive");
  if (c == 1) {
    v_[0] = 1.0;
    return;
  }
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(c));
  for (long x = 0; x < c; ++x) buf[x][0] = buf[x][1] = 0;
  const long pp = mod(p, c);
  for (long x = 1; x < c; ++x) {
    if (std::gcd(x, c) != 1) continue;
    long r = static_cast<long>(static_cast<__int128>(pp) * inverse_mod(x, c) % c);
    double a = 2 * kPi * double(r) / double(c);
    buf[x][0] = std::cos(a);
    buf[x][1] = std::sin(a);
  }
  // FFTW_BACKWARD computes sum_x a_x e^{+2 pi i nu x / c}
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(c), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (long nu = 0; nu < c; ++nu) v_[nu] = buf[nu][0];
  fftw_free(buf);
}

double petersson_tail(double mn, int k, long c_max) {
  if (k < 4) throw Error("petersson_tail needs k >= 4");
  // sum_{c >= C} (T/c)^{k-1} / (k-1)! <= (T/C)^{k-1}/(k-1)! (1 + C/(k-2))
  const double T = 2 * kPi * std::sqrt(mn);
  const double C = double(c_max + 1);
  double lt = (k - 1) * std::log(T / C) - std::lgamma(double(k));
  return std::exp(lt) * (1 + C / (k - 2));
}

Certified petersson_rhs_q(long m, long n, int k, long c_max) {
  if (k < 4 || k % 2) throw Error("petersson_rhs_q needs even k >= 4");
  if (m < 1 || n < 1) throw Error("petersson_rhs_q needs m, n >= 1");
  if (c_max < 1) throw Error("c_max must be >= 1");
  const double sign = (k / 2) % 2 ? -1.0 : 1.0;
  const double x0 = 4 * kPi * std::sqrt(double(m) * double(n));
  double sum = 0, comp = 0, abs_sum = 0;
  for (long c = 1; c <= c_max; ++c) {
    double x = x0 / double(c);
    double J = bessel_j(k - 1, x);
    if (J == 0.0) continue;
    double term = kloosterman_q(m, n, c) / double(c) * J;
    double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    abs_sum += std::fabs(term);
  }
  Certified out;
  out.value = (m == n ? 1.0 : 0.0) + 2 * kPi * sign * (sum + comp);
  out.cert = 2 * kPi * (petersson_tail(double(m) * double(n), k, c_max) + 1e-13 * abs_sum + 1e-300);
  return out;
}

double petersson_rhs_q_signed(long m, long n, int k, long c_max) {
  if (k < 4 || k % 2) throw Error("petersson_rhs_q needs even k >= 4");
  const double C = ((k / 2) % 2 ? -1.0 : 1.0) * (2 * kPi) / 2;
  const double x0 = 4 * kPi * std::sqrt(double(m) * double(n));
  double sum = 0;
  for (long c = -c_max; c <= c_max; ++c) {
    if (c == 0) continue;
    long ac = c < 0 ? -c : c;
    // e((m x + n xbar)/c) for negative c is the conjugate of the |c| sum
    std::complex<double> S = kloosterman_q_complex(m, n, ac);
    if (c < 0) S = std::conj(S);
    sum += S.real() / double(ac) * bessel_j(k - 1, x0 / double(ac));
  }
  return (m == n ? 1.0 : 0.0) + C * sum;
}

long petersson_c_cutoff(long m, long n, int k, double tol) {
  if (!(tol > 0)) throw Error("tolerance must be positive");
  long c = 1;
  while (2 * kPi * petersson_tail(double(m) * double(n), k, c) >= tol) {
    c *= 2;
    if (c > (1L << 40)) throw Error("Petersson c-cutoff overflow");
  }
  long lo = c / 2, hi = c;  // tail(lo) >= tol unless lo = 0
  while (hi - lo > 1) {
    long mid = (lo + hi) / 2;
    if (2 * kPi * petersson_tail(double(m) * double(n), k, mid) < tol)
      hi = mid;
    else
      lo = mid;
  }
  return std::max(1L, hi);
}

UnitSum unit_sum_tail(const FieldDescriptor& F, double lambda0, double B) {
  if (!(lambda0 >= 0)) throw Error("lambda0 must be nonnegative");
  UnitSum out;
  auto units = totally_positive_units(F, B);
  out.terms = units.size();
  for (const auto& u : units) {
    double t = 1;
    for (double s : embed_double(F, u))
      if (std::fabs(s) > 1) t *= std::pow(std::fabs(s), -lambda0);
    out.partial += t;
  }
  if (F.degree == 1) return out;
  if (lambda0 == 0) {
    out.tail = INFINITY;
    return out;
  }
  // units g^t with g the totally positive generator; term = e_g^{-|t| lambda0}
  double eps = F.epsilon0();
  double eg = F.fundamental_unit_norm == -1 ? eps * eps : eps;
  long T = static_cast<long>(units.size() - 1) / 2;
  double r = std::pow(eg, -lambda0);
  out.tail = 2 * std::pow(r, double(T + 1)) / (1 - r);
  return out;
}

}  // namespace rsm
