#include "rsmoment/mpfr.hpp"

#include <algorithm>
#include <vector>

namespace rsm {

Mpfr::Mpfr(mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

Mpfr::Mpfr(double v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Mpfr::Mpfr(const BigInt& v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_z(v_, v.backend().data(), MPFR_RNDN);
}

Mpfr::Mpfr(const BigRat& v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_q(v_, v.backend().data(), MPFR_RNDN);
}

Mpfr::Mpfr(const Mpfr& o) {
  mpfr_init2(v_, o.prec());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Mpfr::Mpfr(Mpfr&& o) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}

Mpfr& Mpfr::operator=(const Mpfr& o) {
  if (this != &o) {
    mpfr_set_prec(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Mpfr& Mpfr::operator=(Mpfr&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Mpfr::~Mpfr() { mpfr_clear(v_); }

std::string Mpfr::str(int digits) const {
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

namespace {
void widen(Mpfr& a, const Mpfr& b) {
  if (b.prec() > a.prec()) mpfr_prec_round(a.get(), b.prec(), MPFR_RNDN);
}
}  // namespace

Mpfr& Mpfr::operator+=(const Mpfr& o) {
  widen(*this, o);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Mpfr& Mpfr::operator-=(const Mpfr& o) {
  widen(*this, o);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Mpfr& Mpfr::operator*=(const Mpfr& o) {
  widen(*this, o);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Mpfr& Mpfr::operator/=(const Mpfr& o) {
  widen(*this, o);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Mpfr operator+(const Mpfr& a, const Mpfr& b) { Mpfr r(a); r += b; return r; }
Mpfr operator-(const Mpfr& a, const Mpfr& b) { Mpfr r(a); r -= b; return r; }
Mpfr operator*(const Mpfr& a, const Mpfr& b) { Mpfr r(a); r *= b; return r; }
Mpfr operator/(const Mpfr& a, const Mpfr& b) { Mpfr r(a); r /= b; return r; }
Mpfr operator-(const Mpfr& a) {
  Mpfr r(a);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

Mpfr abs(const Mpfr& x) {
  Mpfr r(x);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}

Mpfr sqrt(const Mpfr& x) {
  Mpfr r(x);
  mpfr_sqrt(r.get(), r.get(), MPFR_RNDN);
  return r;
}

Mpfr log(const Mpfr& x) {
  Mpfr r(x);
  mpfr_log(r.get(), r.get(), MPFR_RNDN);
  return r;
}

Mpfr half_integer_power(unsigned long m, unsigned long e, mpfr_prec_t prec) {
  Mpfr r(prec);
  mpfr_ui_pow_ui(r.get(), m, e / 2, MPFR_RNDN);
  if (e % 2) {
    Mpfr s(prec);
    mpfr_sqrt_ui(s.get(), m, MPFR_RNDN);
    r *= s;
  }
  return r;
}

}  // namespace rsm
