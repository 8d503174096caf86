#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rsmoment/error.hpp"
#include "rsmoment/modforms.hpp"

namespace rsm {

// Data of the weight function V_{1/2}: weights k_j > l_j per embedding,
// conductor Q = N(n D_F^2), G(u) = exp(g_scale u^2), contour Re u = contour.
struct VParams {
  std::vector<int> k;
  std::vector<int> l;
  double conductor = 1.0;
  double g_scale = 1.0;
  double contour = 1.5;

  void validate() const;  // "weight constraint k_j > l_j violated" among others
  static VParams degree_one(int k, int l, double conductor = 1.0);
};

// V(y) = (1/2 pi i) int_(contour) y^{-u} gamma(1/2,u) G(u) du/u by the
// trapezoid rule in Im u. For y < 1 the contour is moved to Re u = -1/2
// and the residue 1 at u = 0 is added.
class VFunction {
 public:
  explicit VFunction(VParams p, double tol = 1e-14);

  const VParams& params() const { return p_; }
  Certified operator()(double y) const;
  // Rigorous |V(y)| <= min over sigma > 0 of y^-sigma gamma(sigma) e^(c sigma^2) / (2 sigma sqrt(pi c)).
  double envelope(double y) const;
  // log of gamma(1/2, sigma) for real sigma.
  double log_gamma_factor(double sigma) const;
  size_t node_count() const { return hi_.w.size(); }
  // Grid of contour heights sigma and phi(sigma) = log of the envelope at y = 1.
  const std::vector<double>& envelope_sigmas() const { return env_sigma_; }
  const std::vector<double>& envelope_phis() const { return env_phi_; }
  // (4 pi^2)^n / Q, the y-value attached to the index m = 1.
  double y_unit() const;

  // Envelope minimization along increasing y, amortized over a sweep.
  class Sweep {
   public:
    explicit Sweep(const VFunction& v) : v_(v) {}
    double operator()(double y);  // y must be nondecreasing across calls

   private:
    const VFunction& v_;
    size_t idx_ = 0;
  };

 private:
  struct Contour {
    double sigma = 0, h = 0, tau = 0;
    std::vector<std::complex<double>> w;  // node weights at t_j = j h
    double abs_sum = 0;
    double log_disc = 0;   // log(2 / (e^{2 pi tau / h} - 1))
    double log_erfc = 0;   // log of the Gaussian tail beyond the last node
    double rel_err = 0;    // relative error of the node weights
  };
  void build(Contour& c, double sigma, double y_ref);
  Certified eval(const Contour& c, double y) const;
  double strip_log_max(const Contour& c, double logy) const;

  VParams p_;
  double tol_;
  Contour hi_, lo_;
  std::vector<double> env_sigma_, env_phi_;
};

Certified v_function(double y, const VParams& p, double tol = 1e-14);

struct RankinSeries {
  int k = 0, l = 0;
  long level = 1;
  std::vector<double> b;  // b[m], m <= M; b[0] unused

  size_t length() const { return b.empty() ? 0 : b.size() - 1; }
};

// b_m = sum_{d^2 | m, gcd(d, N) = 1} C_f(m/d^2) C_g(m/d^2).
RankinSeries b_coefficients(const Eigenform& f, const NewformRecord& g, size_t M);

// d_r(m) for m <= K (number of ordered factorizations into r factors).
std::vector<uint32_t> divisor_function_table(int r, size_t K);

// Rigorous bound on sum_{m > M} d_r(m) m^-s |V(y0 m)|, using the envelope
// up to K = max(8M, 1024) and a Rankin-trick remainder with zeta(s0)^r.
double divisor_weighted_tail(const VFunction& V, double y0, double s, int r, size_t M);

// Smallest M with 2 sum_{m > M} d_4(m) m^-1/2 |V(4^n pi^2n m / Q)| < tol.
size_t effective_cutoff(const VParams& p, double tol);
size_t effective_cutoff(const VFunction& V, double tol);

struct CentralValueOptions {
  double g_scale = 1.0;
  double contour = 1.5;
  double tol = 1e-10;
  size_t cutoff = 0;  // 0 selects effective_cutoff(tol / 2)
};

// V(4 pi^2 m / Q) for m = 1..M with per-value certificates.
struct VTable {
  VParams params;
  std::vector<double> v, cert;  // index m
  double tail = 0;              // bound for 2 sum_{m > M} d_4(m) m^-1/2 |V|
  size_t length() const { return v.empty() ? 0 : v.size() - 1; }
};
VTable make_v_table(const VFunction& V, size_t M);

// L(f x g, 1/2) = 2 sum_m b_m m^-1/2 V(4 pi^2 m / N), degree one.
Certified central_value(const Eigenform& f, const NewformRecord& g,
                        const CentralValueOptions& opt = {});
Certified central_value(const Eigenform& f, const NewformRecord& g, const VTable& table);

}  // namespace rsm
