#include "rsmoment/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rsmoment/numfield.hpp"
#include "rsmoment/specialfn.hpp"
#include "rsmoment/tracefmla.hpp"

namespace rsm {

namespace {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::vector<long> prime_factors(long n) {
  std::vector<long> out;
  for (long q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Inverse of a small dense matrix by Gauss-Jordan with partial pivoting.
std::vector<std::vector<long double>> invert(std::vector<std::vector<long double>> a) {
  const size_t n = a.size();
  std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0) throw Error("singular probe matrix in the weight solve");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    long double s = 1 / a[col][col];
    for (size_t j = 0; j < n; ++j) {
      a[col][j] *= s;
      inv[col][j] *= s;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      long double f = a[r][col];
      for (size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

long double inf_norm(const std::vector<std::vector<long double>>& a) {
  long double best = 0;
  for (const auto& row : a) {
    long double s = 0;
    for (auto x : row) s += std::fabs(x);
    best = std::max(best, s);
  }
  return best;
}

Certified rhs_q(long m, long n, int k) {
  return petersson_rhs_q(m, n, k, petersson_c_cutoff(m, n, k, 1e-16));
}

VParams moment_params(const NewformRecord& g, int k, const MomentOptions& opt) {
  if (g.level < 1) throw Error("level of g must be positive");
  VParams p = VParams::degree_one(k, g.weight, double(g.level));
  p.g_scale = opt.g_scale;
  p.contour = opt.contour;
  p.validate();
  return p;
}

// Bound on |sum_{c >= 1} S(nu, p; c)/c J_{n}(X / c)| through |S| <= c:
// terms with (X/2c)^n/n! >= 1 are at most 1 each, the rest is a power tail.
double c_sum_slope(int n) { return 0.5 * std::exp(-std::lgamma(n + 1.0) / n); }

double e_nu_tail(const VFunction& V, int k, long p, size_t M) {
  const int n = k - 1;
  const double a = c_sum_slope(n) * 4 * kPi * std::sqrt(double(p));
  const double y0 = V.y_unit();
  double t0 = divisor_weighted_tail(V, y0, 0.0, 3, M);
  double th = divisor_weighted_tail(V, y0, 0.5, 3, M);
  return 4 * kPi * (double(n) / (n - 1)) * (a * t0 + th);
}

}  // namespace

const std::vector<std::pair<long, long>>& omega_holdout_pairs() {
  static const std::vector<std::pair<long, long>> pairs = {{2, 3}, {3, 5}, {4, 9}, {2, 8}};
  return pairs;
}

OmegaWeights omega_weights(std::vector<Eigenform>& forms, const OmegaOptions& opt) {
  if (forms.empty()) throw Error("empty space");
  const size_t d = forms.size();
  const int k = forms[0].weight;
  OmegaWeights out;
  out.k = k;
  out.probe_set.push_back(1);
  for (long q = 2; out.probe_set.size() < d; ++q)
    if (is_prime(q)) out.probe_set.push_back(q);
  size_t need = size_t(std::max(out.probe_set.back(), 9L));
  for (const auto& f : forms)
    if (f.length() < need || f.weight != k) throw Error("eigenforms too short for the weight solve");

  std::vector<std::vector<long double>> A(d, std::vector<long double>(d));
  std::vector<Certified> r(d);
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) A[i][j] = forms[j].C[size_t(out.probe_set[i])];
    r[i] = rhs_q(out.probe_set[i], 1, k);
  }
  auto Ainv = invert(A);
  out.condition_estimate = double(inf_norm(A) * inf_norm(Ainv));
  if (!(out.condition_estimate <= opt.max_condition))
    throw Error("ill-conditioned weight solve (condition estimate " + std::to_string(out.condition_estimate) + ")");
  out.omega.assign(d, 0);
  out.omega_cert.assign(d, 0);
  for (size_t f = 0; f < d; ++f) {
    long double w = 0, err = 0;
    for (size_t i = 0; i < d; ++i) {
      w += Ainv[f][i] * r[i].value;
      err += std::fabs(Ainv[f][i]) * (r[i].cert + 1e-15 * std::fabs(r[i].value));
    }
    out.omega[f] = double(w);
    out.omega_cert[f] = double(err) + 1e-15 * out.condition_estimate * std::fabs(double(w));
    if (!(out.omega[f] > 0)) throw Error("nonpositive harmonic weight");
    forms[f].omega = out.omega[f];
  }
  for (auto [m, n] : omega_holdout_pairs()) {
    double lhs = 0;
    for (size_t f = 0; f < d; ++f) lhs += out.omega[f] * forms[f].C[size_t(m)] * forms[f].C[size_t(n)];
    double rhs = rhs_q(m, n, k).value;
    double e = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
    out.max_holdout_error = std::max(out.max_holdout_error, e);
  }
  if (!(out.max_holdout_error <= opt.holdout_tol)) throw Error("trace formula inconsistency");
  return out;
}

OmegaWeights omega_weights(int k, const OmegaOptions& opt) {
  auto forms = eigenforms(k, 16);
  return omega_weights(forms, opt);
}

double m_term_residue(const NewformRecord& g, long p, int k) {
  if (k <= g.weight) throw Error("weight constraint k_j > l_j violated");
  if (p < 1 || size_t(p) > g.length()) throw Error("C_g(p) unavailable");
  auto F = FieldDescriptor::make(FieldId::Q);
  auto ld = zeta_laurent_at_center(F, prime_factors(g.level));
  const int l = g.weight;
  double bracket = ld.gamma_0 + 0.5 * ld.gamma_minus1 *
                                    (digamma(0.5 * (k - l + 1)) + digamma(0.5 * (k + l - 1)) -
                                     std::log(4 * kPi * kPi * double(p) / double(g.level)));
  return 2 * g.C[size_t(p)] / std::sqrt(double(p)) * bracket;
}

MomentEngine::MomentEngine(const NewformRecord& g, int k, const MomentOptions& opt)
    : g_(g), k_(k), opt_(opt), V_(moment_params(g, k, opt), std::min(1e-14, opt.tol * 1e-3)) {
  if (!(opt.tol > 0) || !(opt.max_cert > 0)) throw Error("moment tolerances must be positive");
  size_t M = opt.cutoff ? opt.cutoff : effective_cutoff(V_, opt.tol / 2);
  M = std::max<size_t>(M, 16);
  table_ = make_v_table(V_, M);
  if (g_.length() < M) throw Error("insufficient coefficients of g up to " + std::to_string(M));
  omega_.k = k;
  // S_k = 0 (k = 14 among others) leaves the moment as an empty sum
  if (cusp_dimension(k) == 0) return;
  forms_ = rsm::eigenforms(k, M);
  omega_ = omega_weights(forms_);
  for (const auto& f : forms_) central_.push_back(central_value(f, g_, table_));
}

void MomentEngine::check_prime(long p) const {
  if (p != 1 && !is_prime(p)) throw Error("p must be 1 or a prime");
  if (std::gcd(p, g_.level) != 1) throw Error("p must not divide the level of g");
  if (size_t(p) > g_.length()) throw Error("C_g(p) unavailable");
}

Certified MomentEngine::diagonal_sum(long p) const {
  check_prime(p);
  const double y0 = V_.y_unit() * double(p);
  const auto& sg = V_.envelope_sigmas();
  const auto& ph = V_.envelope_phis();
  // sum_{d > D} |V(y0 d^2)| / d <= e^phi y0^-sigma D^-2sigma / (2 sigma)
  auto tail = [&](double D) {
    double best = INFINITY;
    for (size_t i = 0; i < sg.size(); ++i)
      best = std::min(best, ph[i] - sg[i] * std::log(y0) - 2 * sg[i] * std::log(D) - std::log(2 * sg[i]));
    return std::exp(best);
  };
  Certified out;
  double abs_sum = 0;
  for (long d = 1;; ++d) {
    if (std::gcd(d, g_.level) == 1) {
      auto v = V_(y0 * double(d) * double(d));
      out.value += v.value / double(d);
      out.cert += v.cert / double(d);
      abs_sum += std::fabs(v.value) / double(d);
    }
    double t = tail(double(d));
    if (t < opt_.tol * 1e-2) {
      out.cert += t;
      break;
    }
    if (d > 100000000) throw UncertifiedError("diagonal sum did not converge", t);
  }
  out.cert += 1e-15 * abs_sum;
  return out;
}

Certified MomentEngine::m_term_direct(long p) const {
  auto D = diagonal_sum(p);
  double f = 2 * g_.C[size_t(p)] / std::sqrt(double(p));
  return {f * D.value, std::fabs(f) * D.cert};
}

double MomentEngine::m_term_residue(long p) const {
  check_prime(p);
  return rsm::m_term_residue(g_, p, k_);
}

Certified MomentEngine::e_term(long p) const {
  check_prime(p);
  const int k = k_;
  const double sign = (k / 2) % 2 ? -1.0 : 1.0;
  // nu d^2 <= M kept; everything beyond goes into the d_3 tail
  size_t M = std::max<size_t>(table_.length(), 16);
  while (e_nu_tail(V_, k, p, M) > opt_.tol / 2) M = M * 3 / 2;
  const double nu_tail = e_nu_tail(V_, k, p, M);
  if (g_.length() < M) throw Error("insufficient coefficients of g up to " + std::to_string(M));
  VTable local;
  const VTable& T = M <= table_.length() ? table_ : (local = make_v_table(V_, M));

  const double tol_c = opt_.tol * 1e-3;
  const long c_glob = petersson_c_cutoff(long(M), p, k, tol_c);
  std::vector<KloostermanTable> kl;
  kl.reserve(size_t(c_glob));
  for (long c = 1; c <= c_glob; ++c) kl.emplace_back(p, c);

  double sum = 0, comp = 0, abs_sum = 0, cert = 0;
  for (size_t nu = 1; nu <= M; ++nu) {
    double W = 0, Wc = 0;
    for (size_t d = 1; nu * d * d <= M; ++d) {
      if (std::gcd(long(d), g_.level) != 1) continue;
      W += T.v[nu * d * d] / double(d);
      Wc += T.cert[nu * d * d] / double(d);
    }
    const double Cg = g_.C[nu];
    const double w = Cg * W / std::sqrt(double(nu));
    const double wc = std::fabs(Cg) * Wc / std::sqrt(double(nu));
    if (w == 0 && wc == 0) continue;
    const long cmax = std::min(c_glob, petersson_c_cutoff(long(nu), p, k, tol_c));
    const double X = 4 * kPi * std::sqrt(double(nu) * double(p));
    double inner = 0, inner_abs = 0;
    for (long c = 1; c <= cmax; ++c) {
      double J = bessel_j(k - 1, X / double(c));
      double t = kl[size_t(c - 1)](long(nu)) / double(c) * J;
      inner += t;
      inner_abs += std::fabs(t);
    }
    double term = w * inner;
    double s = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - s) + term : (term - s) + sum;
    sum = s;
    abs_sum += std::fabs(w) * inner_abs;
    cert += (std::fabs(w) + wc) * petersson_tail(double(nu) * double(p), k, cmax) + wc * inner_abs;
  }
  Certified out;
  out.value = 4 * kPi * sign * (sum + comp);
  // Kloosterman values come from an FFT of length c; 1e-13 covers its rounding
  out.cert = 4 * kPi * (cert + nu_tail + 1e-13 * abs_sum);
  if (!(out.cert <= opt_.max_cert)) {
    std::ostringstream os;
    os << "uncertified truncation: E certificate " << out.cert;
    throw UncertifiedError(os.str(), out.cert);
  }
  return out;
}

Certified MomentEngine::lhs_moment(long p) const {
  check_prime(p);
  Certified out;
  double abs_sum = 0;
  for (size_t i = 0; i < forms_.size(); ++i) {
    const double w = omega_.omega[i], C = forms_[i].C[size_t(p)], L = central_[i].value;
    out.value += w * C * L;
    out.cert += std::fabs(w * C) * central_[i].cert + omega_.omega_cert[i] * std::fabs(C * L);
    abs_sum += std::fabs(w * C * L);
  }
  out.cert += 1e-14 * abs_sum;
  if (!(out.cert <= opt_.max_cert)) {
    std::ostringstream os;
    os << "uncertified truncation: moment certificate " << out.cert;
    throw UncertifiedError(os.str(), out.cert);
  }
  return out;
}

Certified MomentEngine::recover_coefficient(long p) const {
  auto D = diagonal_sum(p);
  if (!(std::fabs(2 * D.value) >= 1e-8)) throw Error("degenerate recovery");
  auto L = lhs_moment(p);
  auto E = e_term(p);
  const double sp = std::sqrt(double(p));
  Certified out;
  out.value = sp * (L.value - E.value) / (2 * D.value);
  out.cert = sp * (L.cert + E.cert) / (2 * std::fabs(D.value)) + std::fabs(out.value) * D.cert / std::fabs(D.value);
  return out;
}

MomentReport MomentEngine::report(long p) const {
  MomentReport r;
  r.k = k_;
  r.p = p;
  auto D = diagonal_sum(p);
  const double f = 2 * g_.C[size_t(p)] / std::sqrt(double(p));
  r.m_direct = {f * D.value, std::fabs(f) * D.cert};
  r.m_residue = m_term_residue(p);
  r.e_value = e_term(p);
  r.lhs = lhs_moment(p);
  r.residual = r.lhs.value - (r.m_direct.value + r.e_value.value);
  if (!(std::fabs(2 * D.value) >= 1e-8)) throw Error("degenerate recovery");
  r.recovered_c = std::sqrt(double(p)) * (r.lhs.value - r.e_value.value) / (2 * D.value);
  return r;
}

Certified m_term_direct(const NewformRecord& g, long p, int k, const MomentOptions& opt) {
  return MomentEngine(g, k, opt).m_term_direct(p);
}

Certified e_term(const NewformRecord& g, long p, int k, const MomentOptions& opt) {
  return MomentEngine(g, k, opt).e_term(p);
}

Certified lhs_moment(const NewformRecord& g, long p, int k, const MomentOptions& opt) {
  return MomentEngine(g, k, opt).lhs_moment(p);
}

Certified recover_coefficient(const NewformRecord& g, long p, int k, const MomentOptions& opt) {
  return MomentEngine(g, k, opt).recover_coefficient(p);
}

MomentReport moment_report(const NewformRecord& g, long p, int k, const MomentOptions& opt) {
  return MomentEngine(g, k, opt).report(p);
}

ScanResult asymptotic_scan(const NewformRecord& g, long p, const std::vector<int>& ks, const MomentOptions& opt) {
  if (ks.size() < 2) throw Error("scan needs at least two weights");
  std::vector<int> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  ScanResult out;
  for (int k : sorted) out.rows.push_back(MomentEngine(g, k, opt).report(p));
  const size_t n = out.rows.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : out.rows) {
    double x = std::log(double(r.k)), y = r.lhs.value;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  for (const auto& r : out.rows) {
    double e = r.lhs.value - out.slope * std::log(double(r.k)) - out.intercept;
    out.residuals.push_back(e);
    out.max_residual = std::max(out.max_residual, std::fabs(e));
  }
  auto ld = zeta_laurent_at_center(FieldDescriptor::make(FieldId::Q), prime_factors(g.level));
  out.predicted_slope = 2 * g.C[size_t(p)] * ld.gamma_minus1 / std::sqrt(double(p));
  return out;
}

std::string moment_csv_header() { return "k,p,M_direct,M_residue,E,LHS,residual,recovered_C,cert_total"; }

std::string moment_csv_row(const MomentReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%ld,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g", r.k, r.p, r.m_direct.value,
                r.m_residue, r.e_value.value, r.lhs.value, r.residual, r.recovered_c, r.cert_total());
  return buf;
}

}  // namespace rsm
