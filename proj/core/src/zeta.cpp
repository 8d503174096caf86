#include <cmath>
#include <complex>

#include "rsmoment/error.hpp"
#include "rsmoment/specialfn.hpp"

namespace rsm {

namespace {

using cd = std::complex<double>;

// B_{2j} / (2j)! for j = 1..16, from B_{2j}/(2j)! = (-1)^(j+1) 2 zeta(2j) / (2 pi)^(2j).
struct BernoulliTable {
  double c[17];
  BernoulliTable() {
    c[0] = 0;
    for (int j = 1; j <= 16; ++j) {
      double z = 0;
      for (int n = 1000; n >= 1; --n) z += std::pow(double(n), -2.0 * j);
      if (j == 1) z = kPi * kPi / 6;  // the tail of the j = 1 sum is too slow
      c[j] = (j % 2 ? 2.0 : -2.0) * z / std::pow(2 * kPi, 2.0 * j);
    }
  }
};
const BernoulliTable& bern() {
  static const BernoulliTable t;
  return t;
}

// Euler-Maclaurin correction sum_j B_{2j}/(2j)! s(s+1)...(s+2j-2) (D/u)^(2j-1) u^(-s)
cd em_correction(cd s, double u, double D) {
  cd us = std::exp(-s * std::log(u));
  cd poch = s;  // s(s+1)...(s+2j-2)
  double r = D / u;
  double rp = r;
  cd sum = 0;
  for (int j = 1; j <= 16; ++j) {
    cd term = bern().c[j] * poch * rp;
    sum += term;
    if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    poch *= (s + double(2 * j - 1)) * (s + double(2 * j));
    rp *= r * r;
  }
  return sum * us;
}

int kronecker(long D, long a) {
  long r = ((a % D) + D) % D;
  if (D == 5) {
    if (r == 1 || r == 4) return 1;
    if (r == 2 || r == 3) return -1;
    return 0;
  }
  if (D == 8) {
    if (r == 1 || r == 7) return 1;
    if (r == 3 || r == 5) return -1;
    return 0;
  }
  throw Error("unsupported character conductor");
}

// e^z - 1 without cancellation for small z
cd cexpm1(cd z) {
  double x = z.real(), y = z.imag();
  double sy = std::sin(0.5 * y);
  double re = std::expm1(x) * std::cos(y) - 2.0 * sy * sy;
  double im = std::exp(x) * std::sin(y);
  return {re, im};
}

}  // namespace

cd riemann_zeta(cd s) {
  if (s == cd(1.0, 0.0)) throw Error("zeta pole at s = 1");
  int N = 20 + static_cast<int>(std::fabs(s.imag()));
  cd sum = 0;
  for (int n = N - 1; n >= 1; --n) sum += std::exp(-s * std::log(double(n)));
  double u = N;
  cd uS = std::exp(-s * std::log(u));
  sum += u * uS / (s - 1.0) + 0.5 * uS;
  sum += em_correction(s, u, 1.0);
  return sum;
}

double riemann_zeta(double s) { return riemann_zeta(cd(s, 0.0)).real(); }

cd dirichlet_l(cd s, long D) {
  int J = 20 + static_cast<int>(std::fabs(s.imag()));
  cd direct = 0;
  for (long n = long(J) * D - 1; n >= 1; --n) {
    int chi = kronecker(D, n);
    if (chi) direct += double(chi) * std::exp(-s * std::log(double(n)));
  }
  // Tail over each residue class a: sum_{j >= J} (jD + a)^(-s).
  cd integral = 0, boundary = 0;
  double lref = std::log(double(J) * D + D);
  cd base = std::exp((1.0 - s) * lref);
  for (long a = 1; a <= D; ++a) {
    int chi = kronecker(D, a);
    if (!chi) continue;
    double u = double(J) * D + a;
    double la = std::log(u);
    // sum_a chi(a) = 0 removes the pole of the integral term
    integral += double(chi) * base * cexpm1((1.0 - s) * (la - lref));
    boundary += double(chi) * (0.5 * std::exp(-s * la) + em_correction(s, u, double(D)));
  }
  return direct + integral / (double(D) * (s - 1.0)) + boundary;
}

cd zeta_partial(const FieldDescriptor& F, cd s, const std::vector<long>& removed) {
  if (!(s.real() > 1)) throw Error("outside convergence region");
  cd z = riemann_zeta(s);
  if (F.degree == 2) z *= dirichlet_l(s, F.discriminant);
  for (long l : removed) {
    cd ls = std::exp(-s * std::log(double(l)));
    int chi = F.degree == 2 ? kronecker(F.discriminant, l) : 0;
    if (F.degree == 1 || chi == 0)
      z *= 1.0 - ls;
    else if (chi == 1)
      z *= (1.0 - ls) * (1.0 - ls);
    else
      z *= 1.0 - ls * ls;
  }
  return z;
}

LaurentData zeta_laurent_at_center(const FieldDescriptor& F, const std::vector<long>& removed) {
  LaurentData out;
  double P = 1.0;
  double dlogP = 0.0;  // d/ds log of the removed Euler factors at s = 1
  for (long l : removed) {
    double ll = std::log(double(l));
    auto factor = [&](double q, double mult) {
      // mult copies of (1 - q^{-s})
      P *= std::pow(1.0 - 1.0 / q, mult);
      dlogP += mult * std::log(q) / (q - 1.0);
    };
    int chi = F.degree == 2 ? kronecker(F.discriminant, l) : 0;
    if (F.degree == 1 || chi == 0)
      factor(double(l), 1);
    else if (chi == 1)
      factor(double(l), 2);
    else
      factor(double(l) * double(l), 1);
    (void)ll;
  }
  out.gamma_minus1 = F.zeta_residue * P;
  if (F.degree == 1) {
    out.gamma_0 = kEulerGamma * P + P * dlogP;
    return out;
  }
  // Constant term by a Richardson-extrapolated limit at u = 1e-4.
  auto f = [&](double u) {
    return zeta_partial(F, cd(1.0 + 2.0 * u, 0.0), removed).real() - out.gamma_minus1 / (2.0 * u);
  };
  const double u = 1e-4;
  out.gamma_0 = 2.0 * f(0.5 * u) - f(u);
  return out;
}

}  // namespace rsm
