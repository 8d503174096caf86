#pragma once

#include <complex>
#include <vector>

#include "rsmoment/error.hpp"
#include "rsmoment/numfield.hpp"

namespace rsm {

// S(m, n; c) = sum over x mod c, gcd(x, c) = 1, of e((m x + n xbar) / c).
double kloosterman_q(long m, long n, long c);
// Real and imaginary parts; the imaginary part vanishes up to rounding.
std::complex<double> kloosterman_q_complex(long m, long n, long c);

// S(nu, p; c) for all nu mod c at once, by one FFT of length c.
class KloostermanTable {
 public:
  KloostermanTable(long p, long c);
  long modulus() const { return c_; }
  double operator()(long nu) const { return v_[static_cast<size_t>(((nu % c_) + c_) % c_)]; }

 private:
  long c_;
  std::vector<double> v_;
};

struct KloostermanQuery {
  FieldElement alpha{1};
  FieldElement beta{1};
  FieldElement c{1};
  FieldElement scaling{1};  // [a b c^-2]; a totally positive unit with h+ = 1
};

// Residue systems for Kl(alpha, beta; c) with y over (O_F / c)^x and delta the
// totally positive generator of the different:
//   Plain:     e(Tr((alpha y + beta ybar) / c))
//   Dual:      e(Tr((alpha y + beta ybar) / (delta c))), coefficients on D^-1
//   Different: e(Tr((alpha y / delta + beta delta ybar) / c)), x in D^-1, xbar in D
enum class KlConvention { Plain, Dual, Different };

struct KloostermanOptions {
  long norm_cap = 10000;
  KlConvention convention = KlConvention::Dual;
};

// Totally positive generator of the different D_F (1 over Q).
FieldElement different_generator(const FieldDescriptor& F);

// Kl(alpha, beta; c) over F. Value 1 when c is a unit.
std::complex<double> kloosterman_nf_complex(const FieldDescriptor& F, const KloostermanQuery& q,
                                            const KloostermanOptions& opt = {});
double kloosterman_nf(const FieldDescriptor& F, const KloostermanQuery& q,
                      const KloostermanOptions& opt = {});

// delta_{m,n} + 2 pi (-1)^{k/2} sum_{c <= c_max} S(m, n; c)/c J_{k-1}(4 pi sqrt(mn)/c).
// `cert` bounds the tail c > c_max through |S| <= c and J_{k-1}(x) <= (x/2)^{k-1}/(k-1)!.
Certified petersson_rhs_q(long m, long n, int k, long c_max);
// Same sum written over all nonzero c in [-c_max, c_max] with the constant
// C = (-1)^{k/2} (2 pi) / 2; no folding.
double petersson_rhs_q_signed(long m, long n, int k, long c_max);
// Smallest c_max whose tail certificate is below tol.
long petersson_c_cutoff(long m, long n, int k, double tol);
// Bound on |sum_{c > c_max} S(m, n; c)/c J_{k-1}(4 pi sqrt(mn)/c)| (no outer constant).
double petersson_tail(double mn, int k, long c_max);

struct TraceRHSParams {
  std::vector<int> k;          // k_j per embedding
  double c_norm_bound = 50;    // ideals (c) with N(c) <= bound
  double unit_height_bound = 0;  // B; 0 selects eps0^8
  double tol = 1e-6;

  void validate(const FieldDescriptor& F) const;
};

struct TraceRHSResult {
  double value = 0;
  double c_tail = 0;     // ideals beyond the norm bound
  double unit_tail = 0;  // units beyond the height bound
  double rounding = 0;
  size_t ideal_count = 0;
  size_t unit_count = 0;
  double cert() const { return c_tail + unit_tail + rounding; }
};

// 1_{nu ~ xi} + 2 C sum_{(c), N(c) <= bound} sum_{eta, height <= B}
//   Kl(eta nu, xi; c) / N(c) prod_j J_{k_j - 1}(4 pi sqrt(sigma_j(eta nu xi)) / |sigma_j(delta c)|)
// with Kl in the Dual convention and C = (-1)^{k/2} (2 pi)^n / (2 sqrt(d_F)). One generator per ideal is
// used: the factor 2 accounts for -c, and multiplying c by a power of eps0
// is the same as shifting eta. Error "uncertified truncation" when the
// tails exceed tol.
TraceRHSResult petersson_rhs_nf(const FieldDescriptor& F, const FieldElement& nu,
                                const FieldElement& xi, const TraceRHSParams& params);

struct UnitSum {
  double partial = 0;
  double tail = 0;  // geometric bound; infinite for lambda0 = 0
  size_t terms = 0;
};

// sum over totally positive units of height <= B of prod_{|sigma_j| > 1} |sigma_j(eta)|^-lambda0.
UnitSum unit_sum_tail(const FieldDescriptor& F, double lambda0, double B);

}  // namespace rsm
