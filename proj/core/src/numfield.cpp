#include "rsmoment/numfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsmoment/error.hpp"

namespace rsm {

FieldId parse_field_id(const std::string& name) {
  if (name == "Q") return FieldId::Q;
  if (name == "Q_sqrt5") return FieldId::Q_sqrt5;
  if (name == "Q_sqrt2") return FieldId::Q_sqrt2;
  throw Error("unknown field '" + name + "' (expected Q, Q_sqrt5 or Q_sqrt2)");
}

std::string field_name(FieldId id) {
  switch (id) {
    case FieldId::Q: return "Q";
    case FieldId::Q_sqrt5: return "Q_sqrt5";
    case FieldId::Q_sqrt2: return "Q_sqrt2";
  }
  return "?";
}

FieldDescriptor FieldDescriptor::make(FieldId id) {
  FieldDescriptor F;
  F.id = id;
  switch (id) {
    case FieldId::Q:
      break;
    case FieldId::Q_sqrt5:
      // omega = (1+sqrt5)/2, eps0 = omega
      F.degree = 2;
      F.discriminant = 5;
      F.omega_s = 1;
      F.omega_t = 1;
      F.fundamental_unit = {0, 1};
      F.fundamental_unit_norm = -1;
      break;
    case FieldId::Q_sqrt2:
      // omega = sqrt2, eps0 = 1 + sqrt2
      F.degree = 2;
      F.discriminant = 8;
      F.omega_s = 0;
      F.omega_t = 2;
      F.fundamental_unit = {1, 1};
      F.fundamental_unit_norm = -1;
      break;
  }
  if (F.degree == 2)
    F.zeta_residue = 2.0 * std::log(F.epsilon0()) / std::sqrt(double(F.discriminant));
  return F;
}

FieldElement FieldDescriptor::mul(const FieldElement& x, const FieldElement& y) const {
  if (degree == 1) return {x.a * y.a, 0};
  // (a + b w)(c + d w) = ac + t bd + (ad + bc + s bd) w
  BigRat bd = x.b * y.b;
  return {x.a * y.a + omega_t * bd, x.a * y.b + x.b * y.a + omega_s * bd};
}

FieldElement FieldDescriptor::conj(const FieldElement& x) const {
  if (degree == 1) return x;
  // sigma_2(w) = s - w
  return {x.a + omega_s * x.b, -x.b};
}

BigRat FieldDescriptor::norm(const FieldElement& x) const {
  if (degree == 1) return x.a;
  return x.a * x.a + omega_s * x.a * x.b - omega_t * x.b * x.b;
}

BigRat FieldDescriptor::trace(const FieldElement& x) const {
  if (degree == 1) return x.a;
  return 2 * x.a + omega_s * x.b;
}

FieldElement FieldDescriptor::inv(const FieldElement& x) const {
  if (x.is_zero()) throw Error("zero element");
  BigRat n = norm(x);
  FieldElement c = conj(x);
  return {c.a / n, c.b / n};
}

FieldElement FieldDescriptor::div(const FieldElement& x, const FieldElement& y) const {
  return mul(x, inv(y));
}

FieldElement FieldDescriptor::pow(const FieldElement& x, long e) const {
  FieldElement base = e < 0 ? inv(x) : x;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  FieldElement r{1};
  while (n) {
    if (n & 1) r = mul(r, base);
    base = mul(base, base);
    n >>= 1;
  }
  return r;
}

bool FieldDescriptor::is_integral(const FieldElement& x) const {
  using boost::multiprecision::denominator;
  return denominator(x.a) == 1 && denominator(x.b) == 1;
}

bool FieldDescriptor::is_unit(const FieldElement& x) const {
  if (x.is_zero() || !is_integral(x)) return false;
  BigRat n = norm(x);
  return n == 1 || n == -1;
}

bool FieldDescriptor::associated(const FieldElement& x, const FieldElement& y) const {
  if (x.is_zero() || y.is_zero()) return false;
  return is_unit(div(x, y));
}

double FieldDescriptor::epsilon0() const {
  if (degree == 1) return 1.0;
  return embed_double(*this, fundamental_unit)[0];
}

std::string FieldDescriptor::str(const FieldElement& x) const {
  std::ostringstream os;
  os << x.a;
  if (degree == 2) os << (x.b < 0 ? " - " : " + ") << abs(x.b) << "*w";
  return os.str();
}

std::vector<Mpfr> embed(const FieldDescriptor& F, const FieldElement& x, int prec_bits) {
  mpfr_prec_t prec = prec_bits;
  if (F.degree == 1) return {Mpfr(x.a, prec)};
  Mpfr disc(double(F.omega_s * F.omega_s + 4 * F.omega_t), prec);
  Mpfr root = sqrt(disc);
  Mpfr half(0.5, prec);
  Mpfr s(double(F.omega_s), prec);
  Mpfr w1 = (s + root) * half;
  Mpfr w2 = (s - root) * half;
  Mpfr a(x.a, prec), b(x.b, prec);
  return {a + b * w1, a + b * w2};
}

std::vector<double> embed_double(const FieldDescriptor& F, const FieldElement& x) {
  auto e = embed(F, x, 80);
  std::vector<double> r;
  for (auto& v : e) r.push_back(v.to_double());
  return r;
}

bool is_totally_positive(const FieldDescriptor& F, const FieldElement& x) {
  if (x.is_zero()) throw Error("zero element");
  if (F.degree == 1) return x.a > 0;
  // sign of sigma_j decided exactly: a + b w_j > 0 compares a rational
  // against b * (irrational); squaring settles it.
  int prec = 64;
  for (;;) {
    auto e = embed(F, x, prec);
    bool decided = true;
    bool pos = true;
    for (auto& v : e) {
      Mpfr mag = abs(v);
      // |sigma_j| >= |N(x)| / max|sigma| > 0, so enough bits always settle the sign.
      if (mag.to_double() < std::ldexp(1.0, -prec / 2)) decided = false;
      if (v.sign() <= 0) pos = false;
    }
    if (decided) return pos;
    prec *= 2;
    if (prec > 1 << 16) throw Error("cannot decide embedding signs");
  }
}

namespace {
// Generator of O_F^{x+}.
FieldElement totally_positive_generator(const FieldDescriptor& F) {
  const FieldElement& e = F.fundamental_unit;
  if (is_totally_positive(F, e)) return e;
  if (is_totally_positive(F, -e)) return -e;
  return F.mul(e, e);
}
}  // namespace

std::vector<FieldElement> totally_positive_units(const FieldDescriptor& F, double B) {
  if (!(B >= 1.0)) throw Error("unit height bound must be >= 1");
  if (F.degree == 1) return {FieldElement{1}};
  FieldElement g = totally_positive_generator(F);
  auto eg = embed_double(F, g);
  double hg = std::max(std::fabs(std::log(eg[0])), std::fabs(std::log(eg[1])));
  double logB = std::log(B);
  // The 1e-12 slack admits units whose height equals log B up to rounding.
  long tmax = static_cast<long>(std::floor(logB / hg * (1 + 1e-12) + 1e-12));
  std::vector<FieldElement> out;
  bool g_grows = eg[0] > 1.0;
  for (long t = -tmax; t <= tmax; ++t) out.push_back(F.pow(g, g_grows ? t : -t));
  return out;
}

std::vector<FieldElement> unit_square_coset_reps(const FieldDescriptor& F) {
  if (F.degree == 1) return {FieldElement{1}};
  if (F.fundamental_unit_norm == -1) return {FieldElement{1}};
  // With N(eps0) = +1 the quotient O^{x+}/O^{x2} has order two when eps0 is
  // totally positive; the sums over it are not implemented.
  throw Error("epsilon coset nontrivial: unsupported");
}

std::vector<FieldElement> ideal_generators(const FieldDescriptor& F, long max_norm) {
  std::vector<FieldElement> out;
  if (max_norm < 1) return out;
  if (F.degree == 1) {
    for (long c = 1; c <= max_norm; ++c) out.push_back(FieldElement{c});
    return out;
  }
  auto w = embed_double(F, F.omega());
  double eps = F.epsilon0();
  double R1 = eps * std::sqrt(double(max_norm)) * (1 + 1e-9) + 1e-9;
  double R2 = std::sqrt(double(max_norm)) * (1 + 1e-9) + 1e-9;
  double span = w[0] - w[1];
  long bmax = static_cast<long>(std::ceil((R1 + R2) / span)) + 1;

  struct Cand {
    long a, b, n;
    double ratio;
  };
  std::vector<Cand> cands;
  for (long b = -bmax; b <= bmax; ++b) {
    // sigma_1 = a + b w1 in (0, R1], |sigma_2| = |a + b w2| <= R2
    double lo = std::max(-b * w[0], -R2 - b * w[1]);
    double hi = std::min(R1 - b * w[0], R2 - b * w[1]);
    for (long a = static_cast<long>(std::floor(lo)); a <= static_cast<long>(std::ceil(hi)); ++a) {
      if (a == 0 && b == 0) continue;
      long n = a * a + F.omega_s * a * b - F.omega_t * b * b;
      long an = n < 0 ? -n : n;
      if (an == 0 || an > max_norm) continue;
      double s1 = a + b * w[0];
      if (s1 <= 0) continue;
      double ratio = s1 / std::sqrt(double(an));
      if (ratio < 1 - 1e-9 || ratio >= eps * (1 + 1e-9)) continue;
      cands.push_back({a, b, an, ratio});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.n != y.n) return x.n < y.n;
    if (x.ratio != y.ratio) return x.ratio < y.ratio;
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  size_t start = 0;
  for (size_t i = 0; i <= cands.size(); ++i) {
    if (i == cands.size() || cands[i].n != cands[start].n) {
      std::vector<FieldElement> kept;
      for (size_t j = start; j < i; ++j) {
        FieldElement x{cands[j].a, cands[j].b};
        bool dup = false;
        for (auto& y : kept)
          if (F.associated(x, y)) { dup = true; break; }
        if (!dup) kept.push_back(x);
      }
      out.insert(out.end(), kept.begin(), kept.end());
      start = i;
    }
  }
  return out;
}

}  // namespace rsm
