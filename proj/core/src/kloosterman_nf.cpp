#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rsmoment/modforms.hpp"
#include "rsmoment/specialfn.hpp"
#include "rsmoment/tracefmla.hpp"

namespace rsm {

namespace {

using i128 = __int128;

// Element a + b*omega of O_F with machine-integer coordinates.
struct Oint {
  long a = 0, b = 0;
};

long to_long(const BigRat& q, const char* what) {
  if (denominator(q) != 1) throw Error(std::string(what) + " must be integral");
  BigInt n = numerator(q);
  if (abs(n) > BigInt(1) << 40) throw Error(std::string(what) + " is too large");
  return n.convert_to<long>();
}

Oint to_oint(const FieldElement& x, const char* what) {
  return {to_long(x.a, what), to_long(x.b, what)};
}

struct Ring {
  long s, t;  // omega^2 = s omega + t
  Oint mul(Oint x, Oint y) const {
    long bd = x.b * y.b;
    return {x.a * y.a + t * bd, x.a * y.b + x.b * y.a + s * bd};
  }
  Oint conj(Oint x) const { return {x.a + s * x.b, -x.b}; }
  long norm(Oint x) const { return x.a * x.a + s * x.a * x.b - t * x.b * x.b; }
  long trace(Oint x) const { return 2 * x.a + s * x.b; }
};

// Residues of O_F modulo cO_F via the Hermite form of the lattice cO_F:
// basis (r, 0) and (X, g) in (1, omega)-coordinates, box [0, |r|) x [0, g).
struct ResidueBox {
  long r = 1, X = 0, g = 1;

  ResidueBox(const Ring& R, Oint c) {
    // columns c*1 = (a, b) and c*omega = (t b, a + s b)
    long a1 = c.a, b1 = c.b;
    long a2 = R.t * c.b, b2 = c.a + R.s * c.b;
    // extended gcd on the second coordinates
    long old_r = b1, rr = b2, old_u = 1, u = 0, old_v = 0, v = 1;
    while (rr) {
      long q = old_r / rr;
      long tmp = old_r - q * rr;
      old_r = rr;
      rr = tmp;
      tmp = old_u - q * u;
      old_u = u;
      u = tmp;
      tmp = old_v - q * v;
      old_v = v;
      v = tmp;
    }
    long gg = old_r;
    if (gg == 0) throw Error("Kloosterman modulus must be nonzero");
    long Xv = old_u * a1 + old_v * a2;
    if (gg < 0) {
      gg = -gg;
      Xv = -Xv;
    }
    long rv = (b2 / old_r) * a1 - (b1 / old_r) * a2;
    r = rv < 0 ? -rv : rv;
    g = gg;
    X = Xv;
    if (r == 0) throw Error("Kloosterman modulus must be nonzero");
  }
  long size() const { return r * g; }
  Oint reduce(Oint z) const {
    long k = z.b >= 0 ? z.b / g : -((-z.b + g - 1) / g);
    z.a -= k * X;
    z.b -= k * g;
    z.a = ((z.a % r) + r) % r;
    return z;
  }
  Oint mul(const Ring& R, Oint x, Oint y) const {
    // inputs reduced, so products stay far below 2^63
    return reduce(R.mul(x, y));
  }
};

// yO + cO = O iff the 2x2 minors of (y, y*omega, c, c*omega) have gcd 1.
bool coprime_to(const Ring& R, Oint y, Oint c) {
  Oint yw = R.mul(y, {0, 1}), cw = R.mul(c, {0, 1});
  Oint v[4] = {y, yw, c, cw};
  long g = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g = std::gcd(g, v[i].a * v[j].b - v[i].b * v[j].a);
  return g == 1;
}

}  // namespace

FieldElement different_generator(const FieldDescriptor& F) {
  if (F.degree == 1) return FieldElement{1};
  // D_F = (f'(omega)) = (2 omega - s); make it totally positive with a unit
  FieldElement d{BigRat(-F.omega_s), BigRat(2)};
  for (int tries = 0; tries < 4; ++tries) {
    if (is_totally_positive(F, d)) return d;
    if (is_totally_positive(F, -d)) return -d;
    d = F.mul(d, F.fundamental_unit);
  }
  throw Error("no totally positive generator of the different");
}

std::complex<double> kloosterman_nf_complex(const FieldDescriptor& F, const KloostermanQuery& q,
                                            const KloostermanOptions& opt) {
  if (q.c.is_zero()) throw Error("Kloosterman modulus must be nonzero");
  if (F.degree == 1) {
    long c = to_long(q.c.a, "c");
    long beta = to_long(F.mul(q.beta, q.scaling).a, "beta");
    long ac = c < 0 ? -c : c;
    if (ac > opt.norm_cap) throw Error("residue enumeration overflow: N(c) above the cap");
    auto S = kloosterman_q_complex(to_long(q.alpha.a, "alpha"), beta, ac);
    return c < 0 ? std::conj(S) : S;
  }
  const Ring R{F.omega_s, F.omega_t};
  const Oint c = to_oint(q.c, "c");
  const long Nc = R.norm(c);
  const long aN = Nc < 0 ? -Nc : Nc;
  if (aN > opt.norm_cap) throw Error("residue enumeration overflow: N(c) above the cap");
  if (aN == 1) return 1.0;

  const Oint alpha = to_oint(q.alpha, "alpha");
  const Oint beta = R.mul(to_oint(q.beta, "beta"), to_oint(q.scaling, "scaling"));
  Oint delta{1, 0};
  if (opt.convention != KlConvention::Plain) delta = to_oint(different_generator(F), "different");
  const long Nd = R.norm(delta);

  // phase(y) = [Tr(A y) + Tr(B ybar)] / D with D = N(delta) N(c) and
  //   A = alpha conj(delta) conj(c), B = beta conj(delta) conj(c)    (Plain, Dual)
  //   A = alpha conj(delta) conj(c), B = N(delta) beta delta conj(c) (Different)
  const Oint cc = R.conj(c);
  const Oint A = R.mul(R.mul(alpha, R.conj(delta)), cc);
  const Oint B = opt.convention == KlConvention::Different
                     ? R.mul(R.mul(Oint{Nd * beta.a, Nd * beta.b}, delta), cc)
                     : R.mul(R.mul(beta, R.conj(delta)), cc);
  const i128 D = i128(Nd) * Nc;
  const i128 aD = D < 0 ? -D : D;
  const long trA1 = R.trace(A), trAw = R.trace(R.mul(A, {0, 1}));
  const long trB1 = R.trace(B), trBw = R.trace(R.mul(B, {0, 1}));

  ResidueBox box(R, c);
  if (box.size() != aN) throw Error("residue box size does not match N(c)");
  std::vector<Oint> units;
  for (long y2 = 0; y2 < box.g; ++y2)
    for (long y1 = 0; y1 < box.r; ++y1)
      if (coprime_to(R, {y1, y2}, c)) units.push_back({y1, y2});
  const long phi = static_cast<long>(units.size());

  double re = 0, im = 0;
  for (const Oint& y : units) {
    // ybar = y^(phi - 1) in (O/c)^x
    Oint inv{1, 0}, base = y;
    for (long e = phi - 1; e; e >>= 1) {
      if (e & 1) inv = box.mul(R, inv, base);
      base = box.mul(R, base, base);
    }
    inv = box.reduce(inv);
    i128 num = i128(trA1) * y.a + i128(trAw) * y.b + i128(trB1) * inv.a + i128(trBw) * inv.b;
    if (D < 0) num = -num;
    i128 rmod = ((num % aD) + aD) % aD;
    double ang = 2 * kPi * double(rmod) / double(aD);
    re += std::cos(ang);
    im += std::sin(ang);
  }
  return {re, im};
}

double kloosterman_nf(const FieldDescriptor& F, const KloostermanQuery& q, const KloostermanOptions& opt) {
  return kloosterman_nf_complex(F, q, opt).real();
}

void TraceRHSParams::validate(const FieldDescriptor& F) const {
  if (int(k.size()) != F.degree) throw Error("one weight per embedding required");
  for (int kj : k)
    if (kj < 4 || kj % 2) throw Error("weights must be even and >= 4");
  if (!(c_norm_bound >= 1)) throw Error("c_norm_bound must be >= 1");
  if (unit_height_bound != 0 && !(unit_height_bound >= 1)) throw Error("unit_height_bound must be >= 1");
  if (!(tol > 0)) throw Error("tol must be positive");
}

namespace {

// log of (x/2)^{n}/n!
double log_series_bound(int n, double x) { return n * std::log(0.5 * x) - std::lgamma(n + 1.0); }

}  // namespace

TraceRHSResult petersson_rhs_nf(const FieldDescriptor& F, const FieldElement& nu, const FieldElement& xi,
                                const TraceRHSParams& P) {
  P.validate(F);
  if (!is_totally_positive(F, nu) || !is_totally_positive(F, xi))
    throw Error("nu and xi must be totally positive");
  if (!F.is_integral(nu) || !F.is_integral(xi)) throw Error("nu and xi must be integral");
  const int n = F.degree;
  double sign = 1;
  for (int kj : P.k) sign *= (kj / 2) % 2 ? -1.0 : 1.0;
  const double C = sign * std::pow(2 * kPi, n) / (2 * std::sqrt(double(F.discriminant)));
  const double eps = F.epsilon0();
  const double B = P.unit_height_bound > 0 ? P.unit_height_bound : std::pow(eps, 8);

  auto gens = ideal_generators(F, static_cast<long>(std::floor(P.c_norm_bound)));
  auto units = totally_positive_units(F, B);
  TraceRHSResult out;
  out.ideal_count = gens.size();
  out.unit_count = units.size();

  // coefficients sit on D^-1: nu / delta against the modulus c, which puts
  // sigma_j(nu xi) / sigma_j(delta)^2 inside the Bessel argument
  const FieldElement nx = F.mul(nu, xi);
  std::vector<double> s_nx = embed_double(F, nx);
  const std::vector<double> s_d = embed_double(F, different_generator(F));
  for (int j = 0; j < n; ++j) s_nx[j] /= s_d[j] * s_d[j];
  KloostermanOptions kopt;
  kopt.convention = KlConvention::Dual;
  double sum = 0, abs_sum = 0;
  for (const auto& c : gens) {
    double Nc = std::fabs(F.norm(c).convert_to<double>());
    auto sc = embed_double(F, c);
    for (const auto& eta : units) {
      KloostermanQuery q;
      q.alpha = F.mul(eta, nu);
      q.beta = xi;
      q.c = c;
      double Kl = kloosterman_nf(F, q, kopt);
      auto se = embed_double(F, eta);
      double J = 1;
      for (int j = 0; j < n; ++j) J *= bessel_j(P.k[j] - 1, 4 * kPi * std::sqrt(se[j] * s_nx[j]) / std::fabs(sc[j]));
      double term = Kl / Nc * J;
      sum += term;
      abs_sum += std::fabs(term);
    }
  }
  out.value = (F.associated(nu, xi) ? 1.0 : 0.0) + 2 * C * sum;
  out.rounding = 2 * std::fabs(C) * 1e-12 * abs_sum;

  if (n == 2) {
    // eta = g^t with g = eps0^2 totally positive: sigma_1(eta) = e^t, sigma_2(eta) = e^-t.
    double e = F.fundamental_unit_norm == -1 ? eps * eps : eps;
    double le = std::log(e);
    long T = static_cast<long>(units.size() - 1) / 2;
    double lR1 = 0.5 * (P.k[0] - 1) * le, lR2 = 0.5 * (P.k[1] - 1) * le;
    // units beyond height B, for every included ideal: |Kl| / N(c) <= 1 and |J| <= 1
    for (const auto& c : gens) {
      auto sc = embed_double(F, c);
      double la1 = log_series_bound(P.k[0] - 1, 4 * kPi * std::sqrt(s_nx[0]) / std::fabs(sc[0]));
      double la2 = log_series_bound(P.k[1] - 1, 4 * kPi * std::sqrt(s_nx[1]) / std::fabs(sc[1]));
      out.unit_tail += std::exp(la2 - (T + 1) * lR2) / (1 - std::exp(-lR2));
      out.unit_tail += std::exp(la1 - (T + 1) * lR1) / (1 - std::exp(-lR1));
    }
    out.unit_tail *= 2 * std::fabs(C);
    // ideals beyond the norm bound, all units: sum_t min(a1(t), a2(t)) <= m* (1/(1-1/R1) + 1/(1-1/R2))
    // where m* is the crossing value; 1/|sigma_j(c)| <= eps0 / sqrt(N(c)) for the chosen generators.
    auto log_mstar = [&](double Nn) {
      double la1 = log_series_bound(P.k[0] - 1, 4 * kPi * std::sqrt(s_nx[0]) * eps / std::sqrt(Nn));
      double la2 = log_series_bound(P.k[1] - 1, 4 * kPi * std::sqrt(s_nx[1]) * eps / std::sqrt(Nn));
      return (la1 * lR2 + la2 * lR1) / (lR1 + lR2);
    };
    const double geo = 1 / (1 - std::exp(-lR1)) + 1 / (1 - std::exp(-lR2));
    const double gamma_exp = ((P.k[0] - 1) * lR2 + (P.k[1] - 1) * lR1) / (2 * (lR1 + lR2));
    if (gamma_exp <= 1.5) throw Error("weights too small for the ideal-tail bound");
    long n0 = static_cast<long>(std::floor(P.c_norm_bound)) + 1;
    long n1 = 64 * n0;
    double tail = 0;
    for (long m = n0; m <= n1; ++m) tail += double(divisor_count(m)) * std::exp(log_mstar(double(m)));
    // m*(m) = m*(n1) (n1/m)^gamma and d(m) <= 2 sqrt(m)
    double K = std::exp(log_mstar(double(n1))) * std::pow(double(n1), gamma_exp);
    tail += 2 * K * (std::pow(double(n1), 1.5 - gamma_exp) / (gamma_exp - 1.5));
    out.c_tail = 2 * std::fabs(C) * geo * tail;
  } else {
    out.c_tail = 2 * std::fabs(C) * petersson_tail(s_nx[0], P.k[0], static_cast<long>(std::floor(P.c_norm_bound)));
  }
  if (!(out.c_tail + out.unit_tail <= P.tol)) {
    std::ostringstream os;
    os << "uncertified truncation: c-tail " << out.c_tail << ", unit-tail " << out.unit_tail;
    throw UncertifiedError(os.str(), out.c_tail + out.unit_tail);
  }
  return out;
}

}  // namespace rsm
