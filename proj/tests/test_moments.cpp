#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <iostream>

#include "oracles.hpp"
#include "rsmoment/error.hpp"
#include "rsmoment/moments.hpp"
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

const NewformRecord& delta() {
  static const NewformRecord g = newform_from_eigenform(eigenforms(12, 200000)[0]);
  return g;
}

const NewformRecord& g16() {
  static const NewformRecord g = newform_from_eigenform(eigenforms(16, 200000)[0]);
  return g;
}

}  // namespace

TEST(Omega, WeightTwelve) {
  auto w = omega_weights(12);
  ASSERT_EQ(w.omega.size(), 1u);
  // frozen from the independent std::cyl_bessel_j / brute-force Kloosterman sum
  EXPECT_NEAR(oracle::petersson_rhs(1, 1, 12, 400), 2.840287375167501, 1e-12);
  EXPECT_NEAR(w.omega[0], 2.840287375167501, 1e-12);
  EXPECT_EQ(w.probe_set, std::vector<long>{1});
}

TEST(Omega, WeightTwentyFour) {
  auto w = omega_weights(24);
  ASSERT_EQ(w.omega.size(), 2u);
  EXPECT_GT(w.omega[0], 0);
  EXPECT_GT(w.omega[1], 0);
  EXPECT_LE(w.max_holdout_error, 1e-8);
  EXPECT_EQ(w.probe_set, (std::vector<long>{1, 2}));
  auto r = petersson_rhs_q(1, 1, 24, petersson_c_cutoff(1, 1, 24, 1e-16));
  EXPECT_NEAR(w.omega[0] + w.omega[1], r.value, 1e-10);
}

TEST(Omega, PositiveAndConsistentAcrossWeights) {
  for (int k = 12; k <= 48; k += 2) {
    if (cusp_dimension(k) == 0) {
      EXPECT_THROW(omega_weights(k), Error);
      continue;
    }
    auto w = omega_weights(k);
    double sum = 0;
    for (double x : w.omega) {
      EXPECT_GT(x, 0) << k;
      sum += x;
    }
    EXPECT_LE(w.max_holdout_error, 1e-8) << k;
    EXPECT_LT(w.condition_estimate, 1e8);
    auto r = petersson_rhs_q(1, 1, k, petersson_c_cutoff(1, 1, k, 1e-16));
    EXPECT_NEAR(sum, r.value, 1e-10) << k;
  }
}

TEST(Omega, DetectsInconsistentSpectrum) {
  auto forms = eigenforms(24, 40);
  forms[1].C[3] += 1e-3;
  EXPECT_NE(error_text([&] { omega_weights(forms); }).find("trace formula inconsistency"), std::string::npos);
}

TEST(MTerm, ResidueFormAtLevelOne) {
  for (int k : {14, 20, 36, 60}) {
    double expect = 2 * (kEulerGamma + 0.5 * (digamma(0.5 * (k - 11)) + digamma(0.5 * (k + 11)) -
                                              std::log(4 * kPi * kPi)));
    EXPECT_NEAR(m_term_residue(delta(), 1, k), expect, 1e-13) << k;
  }
}

TEST(MTerm, DirectSumStability) {
  MomentOptions a, b;
  b.tol = 1e-13;
  auto x = MomentEngine(delta(), 16, a).m_term_direct(2);
  auto y = MomentEngine(delta(), 16, b).m_term_direct(2);
  EXPECT_NEAR(x.value, y.value, 1e-10);
  EXPECT_LE(x.cert, 1e-10);
}

TEST(MTerm, SignFollowsCoefficient) {
  for (int k : {20, 30, 40})
    for (long p : {2L, 3L, 5L}) {
      double m = m_term_direct(delta(), p, k).value;
      EXPECT_EQ(std::signbit(m), std::signbit(delta().C[size_t(p)])) << k << " " << p;
    }
}

TEST(MTerm, ResidueApproachesDirectSum) {
  for (int k = 14; k <= 60; k += 2) {
    MomentEngine e(delta(), k);
    for (long p : {1L, 2L, 3L}) {
      double d = e.m_term_direct(p).value, r = e.m_term_residue(p);
      EXPECT_LE(std::fabs(r - d), 50.0 / k) << k << " " << p;
    }
  }
}

TEST(ETerm, StableUnderRefinedTruncation) {
  MomentOptions a, b;
  b.tol = 1e-13;
  b.cutoff = 2 * MomentEngine(delta(), 20, a).table().length();
  auto x = e_term(delta(), 1, 20, a), y = e_term(delta(), 1, 20, b);
  EXPECT_NEAR(x.value, y.value, 1e-6);
  EXPECT_LE(std::fabs(x.value - y.value), x.cert + y.cert);
}

TEST(ETerm, WeightConstraint) {
  EXPECT_NE(error_text([] { e_term(delta(), 1, 12); }).find("weight constraint k_j > l_j violated"), std::string::npos);
  EXPECT_NE(error_text([] { m_term_residue(delta(), 1, 12); }).find("weight constraint k_j > l_j violated"),
            std::string::npos);
}

TEST(ETerm, PrimeAndLevelChecks) {
  MomentEngine e(delta(), 16);
  EXPECT_THROW(e.e_term(4), Error);
  NewformRecord g = delta();
  g.level = 2;
  MomentEngine e2(g, 16);
  EXPECT_THROW(e2.e_term(2), Error);
}

TEST(ETerm, UncertifiedTruncationIsAnError) {
  MomentOptions o;
  o.max_cert = 1e-30;
  MomentEngine e(delta(), 16, o);
  EXPECT_THROW(e.e_term(2), UncertifiedError);
  EXPECT_THROW(e.lhs_moment(2), UncertifiedError);
}

TEST(Identity, DiagonalPlusOffDiagonal) {
  for (int k : {16, 20, 24, 28})
    for (long p : {1L, 2L, 3L}) {
      auto r = moment_report(delta(), p, k);
      EXPECT_LE(std::fabs(r.residual), r.cert_total()) << k << " " << p;
      EXPECT_LE(r.cert_total(), 1e-5);
      if (p == 1 && r.lhs.value <= 0) std::cerr << "warning: LHS at p = 1 not positive at k = " << k << "\n";
    }
}

TEST(Identity, EmptySpaceAtFourteen) {
  // S_14 = 0, so the moment vanishes and E cancels M exactly.
  for (long p : {1L, 2L}) {
    auto r = moment_report(delta(), p, 14);
    EXPECT_EQ(r.lhs.value, 0.0);
    EXPECT_NEAR(r.e_value.value, -r.m_direct.value, r.cert_total());
  }
}

TEST(Recovery, Delta) {
  MomentEngine e(delta(), 20);
  EXPECT_NEAR(e.recover_coefficient(2).value, -24 / std::pow(2.0, 5.5), 1e-6);
  EXPECT_NEAR(e.recover_coefficient(1).value, 1.0, 1e-8);
  for (int k : {16, 24, 30}) EXPECT_NEAR(recover_coefficient(delta(), 3, k).value, delta().C[3], 1e-6) << k;
}

TEST(Recovery, DistinguishesForms) {
  double a = recover_coefficient(delta(), 2, 20).value;
  double b = recover_coefficient(g16(), 2, 20).value;
  EXPECT_NEAR(b, 216 / std::pow(2.0, 7.5), 1e-6);
  EXPECT_GT(std::fabs(a - b), 0.1);
}

TEST(Scan, SignOfSlopeAtTwo) {
  auto s = asymptotic_scan(delta(), 2, {16, 20, 24, 28, 32});
  ASSERT_EQ(s.rows.size(), 5u);
  EXPECT_LT(s.slope, 0);
  EXPECT_LT(s.predicted_slope, 0);
  EXPECT_NEAR(s.predicted_slope, 2 * delta().C[2] / std::sqrt(2.0), 1e-14);
  for (size_t i = 1; i < s.rows.size(); ++i) EXPECT_LT(s.rows[i - 1].k, s.rows[i].k);
}

TEST(Scan, CsvRow) {
  MomentReport r;
  r.k = 20;
  r.p = 3;
  r.m_direct = {0.1234567890123456789, 1e-12};
  r.e_value = {-2.5, 1e-11};
  r.lhs = {1, 1e-13};
  r.m_residue = 0.2;
  r.residual = 1e-14;
  r.recovered_c = 0.5;
  EXPECT_EQ(moment_csv_header(), "k,p,M_direct,M_residue,E,LHS,residual,recovered_C,cert_total");
  EXPECT_EQ(moment_csv_row(r), "20,3,0.123456789012346,0.2,-2.5,1,1e-14,0.5,1.11e-11");
}
