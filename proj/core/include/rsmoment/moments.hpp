#pragma once

#include <string>
#include <vector>

#include "rsmoment/error.hpp"
#include "rsmoment/modforms.hpp"
#include "rsmoment/rankin.hpp"

namespace rsm {

// Harmonic weights from the Petersson formula solved on probe indices.
struct OmegaWeights {
  int k = 0;
  std::vector<double> omega;       // one per eigenform, same order
  std::vector<double> omega_cert;  // propagated error bound per weight
  std::vector<long> probe_set;     // 1 followed by the first d - 1 primes
  double condition_estimate = 0;   // infinity-norm condition number of the probe matrix
  double max_holdout_error = 0;    // largest |LHS - RHS| / max(1, |RHS|) over held-out pairs
};

struct OmegaOptions {
  long c_max = 4000;           // Kloosterman modulus cutoff for petersson_rhs_q
  double holdout_tol = 1e-8;
  double max_condition = 1e8;
};

// Held-out (m, n) pairs used to accept a solve.
const std::vector<std::pair<long, long>>& omega_holdout_pairs();

// Solves sum_f omega_f C_f(m_i) = rhs(m_i, 1) and writes omega into `forms`.
// Errors: ill-conditioned probe matrix, "trace formula inconsistency".
OmegaWeights omega_weights(std::vector<Eigenform>& forms, const OmegaOptions& opt = {});
OmegaWeights omega_weights(int k, const OmegaOptions& opt = {});

struct MomentOptions {
  // G(u) = e^{g_scale u^2}. The identity LHS = M + E holds for every
  // admissible G; a small scale shortens all truncations.
  double g_scale = 0.125;
  double contour = 1.5;
  double tol = 1e-10;       // target for each truncated sum
  double max_cert = 1e-6;   // larger E or LHS certificates are an error
  size_t cutoff = 0;        // 0 selects the V-table length from tol
};

struct MomentReport {
  int k = 0;
  long p = 1;
  Certified m_direct;
  double m_residue = 0;
  Certified e_value;
  Certified lhs;
  double residual = 0;  // lhs - (m_direct + e_value)
  double recovered_c = 0;
  double cert_total() const { return m_direct.cert + e_value.cert + lhs.cert; }
};

// Shared work for one (g, k): V, the V table, eigenforms with weights and
// central values. Every p then reuses it.
class MomentEngine {
 public:
  MomentEngine(const NewformRecord& g, int k, const MomentOptions& opt = {});

  int weight() const { return k_; }
  const NewformRecord& form() const { return g_; }
  const VFunction& v() const { return V_; }
  const VTable& table() const { return table_; }
  const std::vector<Eigenform>& eigenforms() const { return forms_; }
  const OmegaWeights& omega() const { return omega_; }
  const std::vector<Certified>& central_values() const { return central_; }

  // sum_{d, gcd(d, N) = 1} V(4 pi^2 p d^2 / N) / d
  Certified diagonal_sum(long p) const;
  Certified m_term_direct(long p) const;
  double m_term_residue(long p) const;
  Certified e_term(long p) const;
  Certified lhs_moment(long p) const;
  // sqrt(p) (LHS - E) / (2 diagonal_sum(p)); error "degenerate recovery".
  Certified recover_coefficient(long p) const;
  MomentReport report(long p) const;

 private:
  void check_prime(long p) const;

  NewformRecord g_;
  int k_;
  MomentOptions opt_;
  VFunction V_;
  VTable table_;
  std::vector<Eigenform> forms_;
  OmegaWeights omega_;
  std::vector<Certified> central_;
};

// 2 C_g(p)/sqrt(p) [gamma_0 + gamma_-1/2 (psi((k-l+1)/2) + psi((k+l-1)/2) - log(4 pi^2 p / N))]
double m_term_residue(const NewformRecord& g, long p, int k);

Certified m_term_direct(const NewformRecord& g, long p, int k, const MomentOptions& opt = {});
Certified e_term(const NewformRecord& g, long p, int k, const MomentOptions& opt = {});
Certified lhs_moment(const NewformRecord& g, long p, int k, const MomentOptions& opt = {});
Certified recover_coefficient(const NewformRecord& g, long p, int k, const MomentOptions& opt = {});
MomentReport moment_report(const NewformRecord& g, long p, int k, const MomentOptions& opt = {});

struct ScanResult {
  std::vector<MomentReport> rows;  // ordered by k
  double slope = 0, intercept = 0;  // lhs ~ slope log k + intercept
  double predicted_slope = 0;       // 2 C_g(p) gamma_-1 / sqrt(p)
  double max_residual = 0;          // max |lhs - slope log k - intercept|
  std::vector<double> residuals;
};

ScanResult asymptotic_scan(const NewformRecord& g, long p, const std::vector<int>& ks,
                           const MomentOptions& opt = {});

// k,p,M_direct,M_residue,E,LHS,residual,recovered_C,cert_total at 15 significant digits.
std::string moment_csv_header();
std::string moment_csv_row(const MomentReport& r);

}  // namespace rsm
