#pragma once

#include <mpfr.h>

#include <boost/multiprecision/gmp.hpp>
#include <string>

namespace rsm {

using BigInt = boost::multiprecision::mpz_int;
using BigRat = boost::multiprecision::mpq_rational;

// Thin RAII wrapper over mpfr_t with an explicit per-value precision.
// Results of binary operations take the larger operand precision.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec = 128);
  Mpfr(double v, mpfr_prec_t prec);
  Mpfr(const BigInt& v, mpfr_prec_t prec);
  Mpfr(const BigRat& v, mpfr_prec_t prec);
  Mpfr(const Mpfr& o);
  Mpfr(Mpfr&& o) noexcept;
  Mpfr& operator=(const Mpfr& o);
  Mpfr& operator=(Mpfr&& o) noexcept;
  ~Mpfr();

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  std::string str(int digits = 20) const;
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  Mpfr& operator+=(const Mpfr& o);
  Mpfr& operator-=(const Mpfr& o);
  Mpfr& operator*=(const Mpfr& o);
  Mpfr& operator/=(const Mpfr& o);

  friend Mpfr operator+(const Mpfr& a, const Mpfr& b);
  friend Mpfr operator-(const Mpfr& a, const Mpfr& b);
  friend Mpfr operator*(const Mpfr& a, const Mpfr& b);
  friend Mpfr operator/(const Mpfr& a, const Mpfr& b);
  friend Mpfr operator-(const Mpfr& a);
  friend bool operator<(const Mpfr& a, const Mpfr& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Mpfr& a, const Mpfr& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }

 private:
  mpfr_t v_;
};

Mpfr abs(const Mpfr& x);
Mpfr sqrt(const Mpfr& x);
Mpfr log(const Mpfr& x);
// m^(e/2) for integers m >= 1, e >= 0.
Mpfr half_integer_power(unsigned long m, unsigned long e, mpfr_prec_t prec);

}  // namespace rsm
