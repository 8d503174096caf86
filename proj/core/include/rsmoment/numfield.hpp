#pragma once

#include <string>
#include <vector>

#include "rsmoment/mpfr.hpp"

namespace rsm {

enum class FieldId { Q, Q_sqrt5, Q_sqrt2 };

FieldId parse_field_id(const std::string& name);  // "Q" | "Q_sqrt5" | "Q_sqrt2"
std::string field_name(FieldId id);

// a + b*omega with exact rational coordinates; b = 0 in degree 1.
struct FieldElement {
  BigRat a = 0;
  BigRat b = 0;

  FieldElement() = default;
  FieldElement(BigRat a_, BigRat b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
  FieldElement(long a_) : a(a_), b(0) {}

  bool is_zero() const { return a == 0 && b == 0; }
  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    return {x.a + y.a, x.b + y.b};
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    return {x.a - y.a, x.b - y.b};
  }
  friend FieldElement operator-(const FieldElement& x) { return {-x.a, -x.b}; }
};

// Totally real field of degree 1 or 2 with narrow class number one.
// In degree 2 the integral basis is (1, omega) with omega^2 = s*omega + t.
struct FieldDescriptor {
  FieldId id = FieldId::Q;
  int degree = 1;
  long discriminant = 1;
  long omega_s = 0;
  long omega_t = 0;
  FieldElement fundamental_unit{1};
  int fundamental_unit_norm = 1;
  double zeta_residue = 1.0;

  static FieldDescriptor make(FieldId id);

  FieldElement omega() const { return {0, 1}; }
  FieldElement mul(const FieldElement& x, const FieldElement& y) const;
  FieldElement conj(const FieldElement& x) const;
  FieldElement inv(const FieldElement& x) const;
  FieldElement div(const FieldElement& x, const FieldElement& y) const;
  FieldElement pow(const FieldElement& x, long e) const;
  BigRat norm(const FieldElement& x) const;
  BigRat trace(const FieldElement& x) const;
  bool is_integral(const FieldElement& x) const;
  bool is_unit(const FieldElement& x) const;
  // x / y lies in O_F and is a unit.
  bool associated(const FieldElement& x, const FieldElement& y) const;
  // First real embedding of the fundamental unit (> 1), in double.
  double epsilon0() const;
  std::string str(const FieldElement& x) const;
};

std::vector<Mpfr> embed(const FieldDescriptor& F, const FieldElement& x, int prec_bits);
std::vector<double> embed_double(const FieldDescriptor& F, const FieldElement& x);

bool is_totally_positive(const FieldDescriptor& F, const FieldElement& x);

// All eta in O_F^{x+} with max_j |log sigma_j(eta)| <= log B, ordered by
// increasing first embedding.
std::vector<FieldElement> totally_positive_units(const FieldDescriptor& F, double B);

std::vector<FieldElement> unit_square_coset_reps(const FieldDescriptor& F);

// One generator for every nonzero integral ideal of norm <= max_norm. In
// degree 2 the generator c satisfies sigma_1(c) > 0 and
// 1 <= sigma_1(c)/sqrt(N(c)) < eps0, which picks it out uniquely up to the
// full unit group. Sorted by norm.
std::vector<FieldElement> ideal_generators(const FieldDescriptor& F, long max_norm);

}  // namespace rsm
