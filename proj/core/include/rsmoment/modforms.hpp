#pragma once

#include <complex>
#include <string>
#include <vector>

#include "rsmoment/mpfr.hpp"
#include "rsmoment/specialfn.hpp"

namespace rsm {

// Exact q-expansion a(0..M) of a level-1 form of weight k.
struct QExpansion {
  int weight = 0;
  std::vector<BigInt> coeffs;  // coeffs[m] = a(m), coeffs[0] = a(0)

  size_t length() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

int cusp_dimension(int k);

// Exact expansions to q^M.
QExpansion eisenstein_series(int k, size_t M);  // normalized constant term 1; k in {4, 6}
QExpansion delta_series(size_t M);

// Echelon basis of S_k: a_i(j) = delta_ij for 1 <= i, j <= dim S_k.
std::vector<QExpansion> miller_basis(int k, size_t M);
// The integral basis Delta^j E_{k-12j}, j = 1..dim S_k, exact to q^M.
std::vector<QExpansion> delta_power_basis(int k, size_t M);

// (T_m f)(n) = sum_{d | gcd(m,n)} d^{k-1} a(mn/d^2) for n <= out_len;
// requires f.length() >= m * out_len.
QExpansion hecke_apply(unsigned long m, const QExpansion& f, size_t out_len);

// Normalized Hecke eigenform with C[m] = a_f(m) / m^((k-1)/2).
struct Eigenform {
  int weight = 0;
  std::vector<double> C;  // C[0] unused (0), C[1] = 1
  double omega = 0;       // harmonic weight, filled by omega_weights
  double hecke_t2 = 0;    // eigenvalue a_f(2)

  size_t length() const { return C.empty() ? 0 : C.size() - 1; }
  double a(size_t m) const;  // a_f(m) in double
};

// All d = dim S_k normalized eigenforms with coefficients to M, ordered by
// increasing a_f(2). Errors: "empty space", "cannot separate eigenforms".
std::vector<Eigenform> eigenforms(int k, size_t M, const PrecisionContext& ctx = {});
// Several weights sharing the per-prime Eisenstein and Delta work.
std::vector<std::vector<Eigenform>> eigenforms_batch(const std::vector<int>& weights, size_t M,
                                                     const PrecisionContext& ctx = {});

struct Evaluation {
  std::complex<double> value;
  double bound = 0;  // truncation tail plus floating-point rounding
};

// sum_{m <= M} a(m) e^(2 pi i m z). Tail via Deligne |a(m)| <= coeff_bound d(m) m^((k-1)/2).
// Error "truncation not certified" if the bound exceeds tol * max(1, |value|).
Evaluation evaluate(const Eigenform& f, std::complex<double> z, double tol = 1e-10);
Evaluation evaluate(const QExpansion& f, std::complex<double> z, double coeff_bound,
                    double tol = 1e-10);

// The fixed form g, already normalized: C[1] = 1.
struct NewformRecord {
  int weight = 0;
  long level = 1;
  std::vector<double> C;  // C[0] unused
  std::vector<std::string> warnings;

  size_t length() const { return C.empty() ? 0 : C.size() - 1; }
};

// Text format: "weight l", "level N", "count M", then M lines "m C(m)".
NewformRecord load_newform(const std::string& path, size_t min_count = 0);
void write_newform(const std::string& path, const NewformRecord& g);
NewformRecord newform_from_eigenform(const Eigenform& f);

// Number of divisors.
long divisor_count(unsigned long n);

}  // namespace rsm
