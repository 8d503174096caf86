#include "rsmoment/specialfn.hpp"

#include <cmath>

#include "rsmoment/error.hpp"

namespace rsm {

void PrecisionContext::validate() const {
  if (working_bits < 64) throw Error("working_bits must be >= 64");
  if (!(target_rel_tol > 0)) throw Error("target_rel_tol must be positive");
}

namespace {

// B_{2k} / (2k (2k-1)) for the Stirling series of log Gamma.
constexpr double kStirling[] = {
    1.0 / 12,          -1.0 / 360,        1.0 / 1260,        -1.0 / 1680,
    1.0 / 1188,        -691.0 / 360360,   1.0 / 156,         -3617.0 / 122400,
    43867.0 / 244188,  -174611.0 / 125400};

// B_{2k} / (2k) for the asymptotic series of psi.
constexpr double kDigamma[] = {1.0 / 12,  -1.0 / 120,      1.0 / 252, -1.0 / 240,
                               1.0 / 132, -691.0 / 32760,  1.0 / 12,  -3617.0 / 8160};

// Shift target for the asymptotic series: with |w| >= 15 ten Stirling
// terms leave an error far below 1e-16 relative.
constexpr double kShift = 15.0;

}  // namespace

std::complex<double> log_gamma(std::complex<double> z, const PrecisionContext& ctx) {
  ctx.validate();
  if (z.imag() == 0 && z.real() <= 0 && z.real() == std::floor(z.real()))
    throw Error("gamma pole");
  std::complex<double> shift_sum = 0;
  std::complex<double> w = z;
  // Principal logs of (z + j) are analytic off (-inf, -j], so the shifted sum
  // continues log Gamma with its cut on the negative real axis.
  while (w.real() < kShift) {
    shift_sum += std::log(w);
    w += 1.0;
  }
  std::complex<double> inv = 1.0 / w;
  std::complex<double> inv2 = inv * inv;
  std::complex<double> series = 0;
  std::complex<double> p = inv;
  double tol = std::max(ctx.target_rel_tol * 1e-4, 1e-300);
  for (double c : kStirling) {
    std::complex<double> term = c * p;
    series += term;
    if (std::abs(term) < tol) break;
    p *= inv2;
  }
  const double half_log_2pi = 0.91893853320467274178032973640561764;
  return (w - 0.5) * std::log(w) - w + half_log_2pi + series - shift_sum;
}

double digamma(double a, const PrecisionContext& ctx) {
  ctx.validate();
  if (!(a > 0)) throw Error("digamma requires a > 0");
  double shift = 0;
  while (a < kShift) {
    shift += 1.0 / a;
    a += 1.0;
  }
  double inv2 = 1.0 / (a * a);
  double p = inv2;
  double series = 0;
  for (double c : kDigamma) {
    series += c * p;
    p *= inv2;
  }
  return std::log(a) - 0.5 / a - series - shift;
}

double gamma_quotient_check(double A, double c, double t) {
  if (!(A > 0)) throw Error("gamma quotient requires A > 0");
  if (!(std::fabs(c) < A / 2)) throw Error("gamma quotient requires |c| < A/2");
  std::complex<double> num = log_gamma({A + c, t});
  std::complex<double> den = log_gamma({A, t});
  double logmod = 0.5 * std::log(A * A + t * t);
  return std::exp(num.real() - den.real() - c * logmod);
}

}  // namespace rsm
