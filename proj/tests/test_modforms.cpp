#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rsmoment/error.hpp"
#include "rsmoment/modforms.hpp"

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

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("rsm_test_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(Modforms, CuspDimensions) {
  const int expect[] = {0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 3, 2, 3};
  for (int k = 0; k <= 40; k += 2) EXPECT_EQ(cusp_dimension(k), expect[k / 2]) << k;
  EXPECT_EQ(cusp_dimension(13), 0);
}

TEST(Modforms, DeltaMatchesProductExpansion) {
  auto ref = oracle::delta_naive(60);
  auto d = delta_series(60);
  for (size_t m = 0; m <= 60; ++m) EXPECT_EQ(double(d.coeffs[m]), double(ref[m])) << m;
  auto mb = miller_basis(12, 10);
  ASSERT_EQ(mb.size(), 1u);
  EXPECT_EQ(mb[0].coeffs[2], -24);
}

TEST(Modforms, MillerBasisIsEchelon) {
  for (int k : {24, 36, 48}) {
    auto basis = miller_basis(k, 40);
    const size_t d = size_t(cusp_dimension(k));
    ASSERT_EQ(basis.size(), d);
    for (size_t i = 0; i < d; ++i) {
      EXPECT_EQ(basis[i].coeffs[0], 0);
      for (size_t j = 1; j <= d; ++j) EXPECT_EQ(basis[i].coeffs[j], i + 1 == j ? 1 : 0);
    }
  }
  auto b24 = miller_basis(24, 10);
  EXPECT_EQ(b24[0].coeffs[1], 1);
  EXPECT_EQ(b24[0].coeffs[2], 0);
}

TEST(Modforms, EmptySpace) {
  EXPECT_NE(error_text([] { miller_basis(14, 10); }).find("empty space"), std::string::npos);
  EXPECT_NE(error_text([] { eigenforms(13, 10); }).find("empty space"), std::string::npos);
}

TEST(Modforms, HeckeOnDelta) {
  auto d = delta_series(200);
  auto t1 = hecke_apply(1, d, 200);
  for (size_t n = 0; n <= 200; ++n) EXPECT_EQ(t1.coeffs[n], d.coeffs[n]);
  auto t2 = hecke_apply(2, d, 100);
  for (size_t n = 1; n <= 100; ++n) EXPECT_EQ(t2.coeffs[n], -24 * d.coeffs[n]) << n;
  EXPECT_NE(error_text([&] { hecke_apply(3, d, 100); }).find("length underflow"), std::string::npos);
}

TEST(Modforms, HeckeStabilityAndTraceOnS24) {
  auto basis = miller_basis(24, 400);
  ASSERT_EQ(basis.size(), 2u);
  BigInt trace = 0;
  for (size_t i = 0; i < 2; ++i) {
    auto t = hecke_apply(2, basis[i], 200);
    trace += t.coeffs[i + 1];
    // T_2 f - sum_j (T_2 f)(j) b_j vanishes exactly
    for (size_t n = 1; n <= 200; ++n) {
      BigInt r = t.coeffs[n] - t.coeffs[1] * basis[0].coeffs[n] - t.coeffs[2] * basis[1].coeffs[n];
      EXPECT_EQ(r, 0) << "n=" << n;
    }
  }
  EXPECT_EQ(trace, 1080);
}

TEST(Modforms, EigenvaluesAtTwo) {
  auto e12 = eigenforms(12, 50);
  ASSERT_EQ(e12.size(), 1u);
  EXPECT_NEAR(e12[0].C[2], -24 / std::pow(2.0, 5.5), 1e-15);
  EXPECT_NEAR(e12[0].C[2], -0.530330085889911, 1e-14);

  auto e16 = eigenforms(16, 50);
  ASSERT_EQ(e16.size(), 1u);
  EXPECT_NEAR(e16[0].hecke_t2, 216, 1e-9);

  auto e24 = eigenforms(24, 50);
  ASSERT_EQ(e24.size(), 2u);
  const double r = 12 * std::sqrt(144169.0);
  EXPECT_NEAR(e24[0].hecke_t2, 540 - r, 1e-8);
  EXPECT_NEAR(e24[1].hecke_t2, 540 + r, 1e-8);
}

TEST(Modforms, EigenformProperties) {
  for (int k : {12, 16, 24, 30, 36, 44}) {
    const size_t M = 400;
    auto forms = eigenforms(k, M);
    ASSERT_EQ(forms.size(), size_t(cusp_dimension(k)));
    double t2 = 0;
    for (const auto& f : forms) {
      t2 += f.a(2);
      EXPECT_EQ(f.C[1], 1.0);
      for (size_t m = 2; m * m <= M; ++m)
        for (size_t n = 2; m * n <= M; ++n) {
          if (std::gcd(m, n) != 1) continue;
          double lhs = f.a(m * n), rhs = f.a(m) * f.a(n);
          EXPECT_LE(std::fabs(lhs - rhs), 1e-9 * std::fabs(rhs) + 1e-9) << k << " " << m << " " << n;
        }
      for (size_t p : {2, 3, 5, 7, 11, 13, 17, 19}) {
        double lhs = f.a(p * p), rhs = f.a(p) * f.a(p) - std::pow(double(p), k - 1);
        EXPECT_LE(std::fabs(lhs - rhs), 1e-9 * std::fabs(rhs)) << k << " " << p;
      }
      for (size_t p = 2; p <= M; ++p)
        if (oracle::divisors(long(p)) == 2) {
          EXPECT_LE(std::fabs(f.C[p]), 2 + 1e-9);
        }
    }
    // sum of eigenvalues equals the trace of the integral T_2 matrix
    auto basis = miller_basis(k, 2 * forms.size() + 2);
    BigInt trace = 0;
    for (size_t i = 0; i < basis.size(); ++i) trace += hecke_apply(2, basis[i], basis.size()).coeffs[i + 1];
    EXPECT_NEAR(t2 / double(trace), 1.0, 1e-8) << k;
  }
}

TEST(Modforms, DeltaAtI) {
  auto f = eigenforms(12, 100)[0];
  auto v = evaluate(f, {0, 1});
  EXPECT_NEAR(v.value.real(), 0.0017853698506421, 1e-12);
  EXPECT_NEAR(v.value.imag(), 0.0, 1e-15);
  // oracle: q-expansion from the naive product at q = e^{-2 pi}
  auto ref = oracle::delta_naive(30);
  long double s = 0, q = std::exp(-2 * 3.14159265358979323846L);
  for (size_t m = 30; m >= 1; --m) s = s * q + ref[m];
  EXPECT_NEAR(v.value.real(), double(s * q), 1e-15);
}

TEST(Modforms, DeltaTransformations) {
  auto f = eigenforms(12, 200)[0];
  std::complex<double> z(0.3, 1.0);
  auto a = evaluate(f, z), b = evaluate(f, z + 1.0);
  EXPECT_LE(std::abs(a.value - b.value), std::max(1e-12, a.bound + b.bound));

  std::complex<double> w(0.2, 1.1);
  auto fz = evaluate(f, w), fw = evaluate(f, -1.0 / w);
  auto z12 = std::pow(w, 12);
  EXPECT_LE(std::abs(fw.value - z12 * fz.value), 1e-10);
  EXPECT_LE(std::abs(fw.value - z12 * fz.value), fw.bound + std::abs(z12) * fz.bound + 1e-16);
}

TEST(Modforms, TruncationNotCertified) {
  auto f = eigenforms(12, 20)[0];
  EXPECT_NE(error_text([&] { evaluate(f, {0, 0.01}); }).find("truncation not certified"), std::string::npos);
}

TEST(Modforms, NewformFileRoundTrip) {
  auto f = eigenforms(12, 10000)[0];
  auto g = newform_from_eigenform(f);
  auto path = std::filesystem::temp_directory_path() / "rsm_test_delta.nf";
  write_newform(path.string(), g);
  auto h = load_newform(path.string(), 10000);
  EXPECT_EQ(h.weight, 12);
  EXPECT_EQ(h.level, 1);
  ASSERT_EQ(h.length(), 10000u);
  for (size_t m = 1; m <= 10000; ++m) ASSERT_NEAR(h.C[m], f.C[m], 1e-15 * std::max(1.0, std::fabs(f.C[m])));
  EXPECT_TRUE(h.warnings.empty());
  EXPECT_THROW(load_newform(path.string(), 20000), Error);
}

TEST(Modforms, NewformFileValidation) {
  auto bad = temp_file("bad.nf", "weight 12\nlevel 1\ncount 2\n1 0\n2 0.1\n");
  EXPECT_NE(error_text([&] { load_newform(bad.string()); }).find("not normalized"), std::string::npos);

  auto wild = temp_file("wild.nf", "weight 12\nlevel 1\ncount 3\n1 1\n2 5\n3 0.2\n");
  auto g = load_newform(wild.string());
  ASSERT_FALSE(g.warnings.empty());
  EXPECT_NE(g.warnings[0].find("Ramanujan violation"), std::string::npos);

  auto junk = temp_file("junk.nf", "weight twelve\n");
  EXPECT_THROW(load_newform(junk.string()), Error);
}
