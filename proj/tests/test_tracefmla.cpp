#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "rsmoment/error.hpp"
#include "rsmoment/tracefmla.hpp"

using namespace rsm;

namespace {

std::string error_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

long inverse_mod(long a, long m) {
  for (long x = 1; x < m; ++x)
    if ((a * x) % m == 1) return x;
  return m == 1 ? 0 : -1;
}

// Totally positive associate of an element (narrow class number one).
FieldElement totally_positive_associate(const FieldDescriptor& F, const FieldElement& x) {
  for (const auto& u : {FieldElement(1), FieldElement(-1), F.fundamental_unit, -F.fundamental_unit}) {
    auto y = F.mul(u, x);
    if (is_totally_positive(F, y)) return y;
  }
  throw Error("no totally positive associate");
}

// Doubles the norm bound from 400 until the c-tail certifies.
double rhs(const FieldDescriptor& F, const FieldElement& nu, const FieldElement& xi, int k, double tol = 1e-6) {
  TraceRHSParams P;
  P.k = {k, k};
  P.unit_height_bound = std::pow(F.epsilon0(), 16);
  P.tol = tol;
  for (P.c_norm_bound = 400;; P.c_norm_bound *= 2) {
    try {
      return petersson_rhs_nf(F, nu, xi, P).value;
    } catch (const UncertifiedError&) {
      if (P.c_norm_bound >= 6400) throw;
    }
  }
}

}  // namespace

TEST(KloostermanQ, SmallModuli) {
  EXPECT_EQ(kloosterman_q(1, 1, 1), 1.0);
  EXPECT_NEAR(kloosterman_q(1, 1, 2), 1.0, 1e-14);
  EXPECT_NEAR(kloosterman_q(1, 1, 3), -1.0, 1e-14);
  EXPECT_NEAR(std::abs(kloosterman_q_complex(3, 7, 17).imag()), 0.0, 1e-12);
}

TEST(KloostermanQ, BruteForceAndTables) {
  for (long c = 1; c <= 120; ++c) {
    for (long n : {1L, 2L, 5L}) {
      KloostermanTable T(n, c);
      for (long m : {-3L, 1L, 2L, 4L, 7L, 12L, 30L}) {
        double ref = oracle::kloosterman_q(m, n, c);
        EXPECT_NEAR(kloosterman_q(m, n, c), ref, 1e-11) << m << " " << n << " " << c;
        EXPECT_NEAR(T(m), ref, 1e-10) << m << " " << n << " " << c;
      }
    }
  }
}

TEST(KloostermanQ, WeilBound) {
  for (long c = 1; c <= 300; ++c)
    for (long m = 1; m <= 6; ++m)
      for (long n = 1; n <= 6; ++n) {
        double g = double(std::gcd(std::gcd(m, n), c));
        double bound = double(oracle::divisors(c)) * std::sqrt(g * double(c));
        EXPECT_LE(std::fabs(kloosterman_q(m, n, c)), bound + 1e-9) << m << " " << n << " " << c;
      }
}

TEST(KloostermanQ, TwistedMultiplicativity) {
  for (auto [q, r] : {std::pair{3L, 4L}, {5L, 7L}, {8L, 9L}, {11L, 13L}, {16L, 5L}, {7L, 25L}})
    for (auto [m, n] : {std::pair{1L, 1L}, {2L, 3L}, {5L, 10L}}) {
      long rb = inverse_mod(r % q, q), qb = inverse_mod(q % r, r);
      double lhs = kloosterman_q(m, n, q * r);
      double rhs = kloosterman_q(m * rb, n * rb, q) * kloosterman_q(m * qb, n * qb, r);
      EXPECT_NEAR(lhs, rhs, 1e-10) << q << " " << r;
    }
}

TEST(PeterssonQ, AgainstIndependentSum) {
  for (auto [m, n] : {std::pair{1L, 1L}, {1L, 2L}, {2L, 3L}, {4L, 9L}})
    for (int k : {12, 16, 24}) {
      auto r = petersson_rhs_q(m, n, k, 200);
      EXPECT_NEAR(r.value, oracle::petersson_rhs(m, n, k, 200), 1e-12) << m << " " << n << " " << k;
      EXPECT_LE(r.cert, 1e-12);
    }
}

TEST(PeterssonQ, SignedSumAndDoubling) {
  for (int k : {12, 20, 32})
    for (auto [m, n] : {std::pair{1L, 1L}, {2L, 5L}, {3L, 3L}}) {
      const long c = petersson_c_cutoff(m, n, k, 1e-14);
      double folded = petersson_rhs_q(m, n, k, c).value;
      EXPECT_NEAR(petersson_rhs_q_signed(m, n, k, c), folded, 1e-12);
      EXPECT_NEAR(petersson_rhs_q(m, n, k, 2 * c).value, folded, 1e-14);
    }
}

TEST(PeterssonQ, TailCertificateCoversTruncation) {
  for (long cmax : {2L, 5L, 10L, 40L}) {
    auto a = petersson_rhs_q(3, 5, 12, cmax);
    auto b = petersson_rhs_q(3, 5, 12, 4000);
    EXPECT_LE(std::fabs(a.value - b.value), a.cert + b.cert);
  }
}

TEST(KloostermanNF, DifferentGenerator) {
  for (auto id : {FieldId::Q_sqrt5, FieldId::Q_sqrt2}) {
    auto F = FieldDescriptor::make(id);
    auto d = different_generator(F);
    EXPECT_TRUE(is_totally_positive(F, d));
    EXPECT_EQ(abs(F.norm(d)), F.discriminant);
    EXPECT_TRUE(F.is_integral(d));
  }
  EXPECT_EQ(different_generator(FieldDescriptor::make(FieldId::Q)), FieldElement(1));
}

TEST(KloostermanNF, BruteForceSmallNorms) {
  for (auto id : {FieldId::Q_sqrt5, FieldId::Q_sqrt2}) {
    auto F = FieldDescriptor::make(id);
    auto delta = different_generator(F);
    const std::vector<FieldElement> coeffs = {FieldElement(1), FieldElement(0, 1), FieldElement(2, -1),
                                              FieldElement(3)};
    for (const auto& c : ideal_generators(F, 60))
      for (const auto& a : coeffs)
        for (const auto& b : coeffs) {
          KloostermanQuery q;
          q.alpha = a;
          q.beta = b;
          q.c = c;
          double ref = oracle::kloosterman_quadratic(F, a, b, c, delta);
          EXPECT_NEAR(kloosterman_nf(F, q), ref, 1e-9) << F.str(c) << " " << F.str(a) << " " << F.str(b);
        }
  }
}

TEST(KloostermanNF, ModulusTwoInSqrt5) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  KloostermanQuery q;
  q.c = FieldElement(2);
  double ref = oracle::kloosterman_quadratic(F, 1, 1, 2, different_generator(F));
  EXPECT_NEAR(kloosterman_nf(F, q), ref, 1e-12);
  q.c = FieldElement(1);
  EXPECT_EQ(kloosterman_nf(F, q), 1.0);
}

TEST(KloostermanNF, SymmetricAndReal) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  for (const auto& c : ideal_generators(F, 40)) {
    KloostermanQuery q, s;
    q.alpha = FieldElement(2, 1);
    q.beta = FieldElement(1, 3);
    q.c = c;
    s = q;
    std::swap(s.alpha, s.beta);
    auto z = kloosterman_nf_complex(F, q);
    EXPECT_NEAR(z.imag(), 0.0, 1e-9);
    EXPECT_NEAR(z.real(), kloosterman_nf(F, s), 1e-9);
  }
}

TEST(KloostermanNF, ReducesToRationalSums) {
  auto F = FieldDescriptor::make(FieldId::Q);
  for (long c = 1; c <= 40; ++c) {
    KloostermanQuery q;
    q.alpha = FieldElement(3);
    q.beta = FieldElement(5);
    q.c = FieldElement(c);
    EXPECT_NEAR(kloosterman_nf(F, q), oracle::kloosterman_q(3, 5, c), 1e-10);
  }
}

TEST(UnitSum, Limits) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  auto s0 = unit_sum_tail(F, 0.0, std::pow(F.epsilon0(), 8));
  EXPECT_TRUE(std::isinf(s0.tail));
  auto s1 = unit_sum_tail(F, 1.0, 1.0);
  EXPECT_EQ(s1.terms, 1u);
  EXPECT_NEAR(s1.partial, 1.0, 1e-15);
}

TEST(UnitSum, TailMatchesLongerPartialSums) {
  for (auto id : {FieldId::Q_sqrt5, FieldId::Q_sqrt2}) {
    auto F = FieldDescriptor::make(id);
    auto a = unit_sum_tail(F, 1.0, std::pow(F.epsilon0(), 8));
    auto b = unit_sum_tail(F, 1.0, std::pow(F.epsilon0(), 60));
    EXPECT_LE(b.partial - a.partial, a.tail * (1 + 1e-12));
    EXPECT_GE(b.partial - a.partial, 0.5 * a.tail);
  }
  auto F2 = FieldDescriptor::make(FieldId::Q_sqrt2);
  EXPECT_LT(unit_sum_tail(F2, 1.0, std::pow(F2.epsilon0(), 16)).tail, 1e-6);
}

TEST(PeterssonNF, DiagonalAtWeightTwenty) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  TraceRHSParams P;
  P.k = {20, 20};
  P.unit_height_bound = std::pow(F.epsilon0(), 16);
  auto a = petersson_rhs_nf(F, 1, 1, P);
  EXPECT_GT(a.value, 0.5);
  EXPECT_LT(a.value, 1.5);
  P.c_norm_bound *= 2;
  P.unit_height_bound = std::pow(F.epsilon0(), 32);
  auto b = petersson_rhs_nf(F, 1, 1, P);
  EXPECT_NEAR(a.value, b.value, 1e-6);
  EXPECT_LE(std::fabs(a.value - b.value), a.cert() + b.cert());
}

TEST(PeterssonNF, SwapSymmetry) {
  for (auto id : {FieldId::Q_sqrt5, FieldId::Q_sqrt2}) {
    auto F = FieldDescriptor::make(id);
    auto nu = totally_positive_associate(F, FieldElement(2, 1));
    auto xi = totally_positive_associate(F, FieldElement(3));
    for (int k : {12, 16}) EXPECT_NEAR(rhs(F, nu, xi, k), rhs(F, xi, nu, k), 1e-10) << field_name(id) << " " << k;
  }
}

TEST(PeterssonNF, UnitHeightInsensitiveAtLargeWeight) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  TraceRHSParams P;
  P.k = {30, 30};
  P.unit_height_bound = 1;
  double a = petersson_rhs_nf(F, 1, 1, P).value;
  P.unit_height_bound = std::pow(F.epsilon0(), 4);
  double b = petersson_rhs_nf(F, 1, 1, P).value;
  EXPECT_LT(std::fabs(a - b), 1e-8);
}

TEST(PeterssonNF, HeckeRelationAtPrimes) {
  // C(p)^2 = C(p^2) + 1 for every eigenform, so R(p, p) = R(p^2, 1) + R(1, 1).
  for (auto id : {FieldId::Q_sqrt5, FieldId::Q_sqrt2}) {
    auto F = FieldDescriptor::make(id);
    // inert, inert, ramified in Q(sqrt5); split (norm 7), inert, ramified in Q(sqrt2)
    std::vector<FieldElement> primes = {id == FieldId::Q_sqrt5 ? FieldElement(2) : FieldElement(3, 1), FieldElement(3)};
    primes.push_back(id == FieldId::Q_sqrt5 ? FieldElement(-1, 2) : FieldElement(0, 1));
    for (auto p : primes) {
      p = totally_positive_associate(F, p);
      double lhs = rhs(F, p, p, 12);
      double r = rhs(F, F.mul(p, p), 1, 12) + rhs(F, 1, 1, 12);
      EXPECT_NEAR(lhs, r, 1e-6) << field_name(id) << " p=" << F.str(p);
    }
  }
}

TEST(PeterssonNF, KernelRankEqualsCuspDimension) {
  // R(nu_i, nu_j) = sum_f omega_f C_f(nu_i) C_f(nu_j) is positive semidefinite
  // with rank dim S_k over Q(sqrt5): 3, 3, 4 at parallel weights 12, 14, 16.
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  std::vector<FieldElement> nus;
  for (const auto& g : ideal_generators(F, 30)) nus.push_back(totally_positive_associate(F, g));
  nus.resize(6);
  for (auto [k, rank] : {std::pair{12, 3}, {14, 3}, {16, 4}}) {
    Eigen::MatrixXd R(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) R(i, j) = R(j, i) = rhs(F, nus[size_t(i)], nus[size_t(j)], k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    auto ev = es.eigenvalues();
    // entries carry certificates of 1e-6, so zero eigenvalues move by at most 6e-6
    for (int i = 0; i < 6 - rank; ++i) EXPECT_LT(std::fabs(ev(i)), 1e-5) << "k=" << k;
    for (int i = 6 - rank; i < 6; ++i) EXPECT_GT(ev(i), 0.1) << "k=" << k;
  }
}

TEST(PeterssonNF, Errors) {
  auto F = FieldDescriptor::make(FieldId::Q_sqrt5);
  TraceRHSParams P;
  P.k = {12};
  EXPECT_THROW(petersson_rhs_nf(F, 1, 1, P), Error);
  P.k = {8, 8};
  P.c_norm_bound = 5;
  EXPECT_NE(error_text([&] { petersson_rhs_nf(F, 1, 1, P); }).find("uncertified truncation"), std::string::npos);
}
