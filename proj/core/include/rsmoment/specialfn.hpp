#pragma once

#include <complex>
#include <vector>

#include "rsmoment/numfield.hpp"

namespace rsm {

struct PrecisionContext {
  int working_bits = 256;         // used by the exact/MPFR stages
  double target_rel_tol = 1e-12;  // accuracy demanded from double routines

  void validate() const;
};

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Principal branch of log Gamma; error "gamma pole" at z = 0, -1, -2, ...
std::complex<double> log_gamma(std::complex<double> z, const PrecisionContext& ctx = {});
double digamma(double a, const PrecisionContext& ctx = {});

// J_n(x) for integer n >= 0 and x >= 0. Regimes: ascending series for
// small x, Miller's backward recurrence in the transition zone, forward
// recurrence from Hankel-asymptotic J_0, J_1 for x >= max(n, 25).
double bessel_j(int order, double x, const PrecisionContext& ctx = {});
// Same value through the Mellin-Barnes contour integral, on Re s = order - 1/2
// for x <= order and Re s = order/2 beyond.
double bessel_j_mellin_barnes(int order, double x, const PrecisionContext& ctx = {});
// Bound (x/2)^n / n! on |J_n(x)|, valid for all x >= 0.
double bessel_series_bound(int order, double x);
// Landau's uniform bound |J_n(x)| <= 0.674886 n^(-1/3).
double bessel_uniform_bound(int order);

double riemann_zeta(double s);
std::complex<double> riemann_zeta(std::complex<double> s);
// L(s, chi_D) for the real primitive character of conductor D in {5, 8}.
std::complex<double> dirichlet_l(std::complex<double> s, long D);

// zeta_F(s) times the Euler factors at all prime ideals above the listed
// rational primes removed. Requires Re s > 1.
std::complex<double> zeta_partial(const FieldDescriptor& F, std::complex<double> s,
                                  const std::vector<long>& removed_primes);

struct LaurentData {
  double gamma_minus1 = 0;  // twice the residue of zeta_F^n(2u+1) at u = 0
  double gamma_0 = 0;       // constant term
};
LaurentData zeta_laurent_at_center(const FieldDescriptor& F,
                                   const std::vector<long>& removed_primes);

// |Gamma(A+c+it) / Gamma(A+it)| / |A+it|^c, requires A > 0 and |c| < A/2.
double gamma_quotient_check(double A, double c, double t);

}  // namespace rsm
