#include "rsmoment/rankin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsmoment/specialfn.hpp"

namespace rsm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double lgamma_real(double x) { return log_gamma(std::complex<double>(x, 0)).real(); }

}  // namespace

void VParams::validate() const {
  if (k.empty() || k.size() != l.size() || k.size() > 2) throw Error("VParams: need n in {1, 2} weight pairs");
  for (size_t j = 0; j < k.size(); ++j) {
    if (k[j] % 2 || l[j] % 2 || l[j] < 2) throw Error("VParams: weights must be even and positive");
    if (k[j] <= l[j]) throw Error("weight constraint k_j > l_j violated");
  }
  if (!(conductor >= 1)) throw Error("VParams: conductor must be >= 1");
  if (!(g_scale > 0)) throw Error("VParams: g_scale must be positive");
  if (!(contour > 0.2) || contour > 20) throw Error("VParams: contour height out of range");
}

VParams VParams::degree_one(int k, int l, double conductor) {
  VParams p;
  p.k = {k};
  p.l = {l};
  p.conductor = conductor;
  return p;
}

double VFunction::log_gamma_factor(double s) const {
  double r = 0;
  for (size_t j = 0; j < p_.k.size(); ++j) {
    double a = 0.5 * (p_.k[j] - p_.l[j]), b = 0.5 * (p_.k[j] + p_.l[j]);
    r += lgamma_real(0.5 + s + a) + lgamma_real(s - 0.5 + b) - lgamma_real(0.5 + a) - lgamma_real(b - 0.5);
  }
  return r;
}

double VFunction::y_unit() const {
  return std::pow(4 * kPi * kPi, double(p_.k.size())) / p_.conductor;
}

VFunction::VFunction(VParams p, double tol) : p_(std::move(p)), tol_(tol) {
  p_.validate();
  if (!(tol > 0)) throw Error("VFunction: tolerance must be positive");
  const double c = p_.g_scale;
  for (double s = 0.02; s <= 40.0 + 1e-9; s += 0.02) {
    env_sigma_.push_back(s);
    env_phi_.push_back(log_gamma_factor(s) + c * s * s - std::log(2 * s * std::sqrt(kPi * c)));
  }
  build(hi_, p_.contour, 1.0);
  build(lo_, -0.5, 1.0);
}

double VFunction::strip_log_max(const Contour& ct, double logy) const {
  const double c = p_.g_scale;
  double best = -INFINITY;
  for (double sp : {ct.sigma - ct.tau, ct.sigma + ct.tau})
    best = std::max(best, -sp * logy + log_gamma_factor(sp) + c * sp * sp);
  return best + std::log(std::sqrt(kPi / c) / (2 * kPi * (std::fabs(ct.sigma) - ct.tau)));
}

void VFunction::build(Contour& ct, double sigma, double y_ref) {
  const double c = p_.g_scale;
  const double target = tol_ / 4;
  ct.sigma = sigma;
  ct.tau = std::fabs(sigma) / 2;
  double lm = strip_log_max(ct, std::log(y_ref));
  // 2 M / (e^{2 pi tau / h} - 1) <= target
  ct.h = 2 * kPi * ct.tau / (std::log1p(2.0 / target) + std::max(lm, 0.0) + 1.0);
  ct.log_disc = std::log(2.0) - std::log(std::expm1(2 * kPi * ct.tau / ct.h));
  double lpre = -sigma * std::log(y_ref) + log_gamma_factor(sigma) + c * sigma * sigma -
                std::log(std::fabs(sigma)) - std::log(kPi) + std::log(std::sqrt(kPi / c) / 2);
  size_t J = 1;
  auto log_tail = [&](size_t j) { return std::log(std::erfc(std::sqrt(c) * double(j) * ct.h)); };
  while (lpre + log_tail(J) > std::log(target)) {
    J = J * 5 / 4 + 1;
    if (J > 1000000) throw Error("VFunction: node count overflow");
  }
  ct.log_erfc = std::log(std::sqrt(kPi / c) / 2) + log_tail(J);
  ct.w.resize(J + 1);
  ct.abs_sum = 0;
  double lg_scale = 0;
  for (size_t j = 0; j < p_.k.size(); ++j) lg_scale += 4 * (p_.k[j] + 2) * std::log(double(p_.k[j]) + 2);
  ct.rel_err = kEps * (64 + lg_scale + c * (sigma * sigma + double(J * J) * ct.h * ct.h));
  for (size_t j = 0; j <= J; ++j) {
    std::complex<double> u(sigma, double(j) * ct.h);
    std::complex<double> lg = c * u * u - std::log(u);
    for (size_t i = 0; i < p_.k.size(); ++i) {
      double a = 0.5 * (p_.k[i] - p_.l[i]), b = 0.5 * (p_.k[i] + p_.l[i]);
      lg += log_gamma(0.5 + u + a) + log_gamma(u - 0.5 + b) - lgamma_real(0.5 + a) - lgamma_real(b - 0.5);
    }
    ct.w[j] = std::exp(lg);
    if (j == 0) ct.w[j] *= 0.5;
    ct.abs_sum += std::abs(ct.w[j]);
  }
}

Certified VFunction::eval(const Contour& ct, double y) const {
  const double c = p_.g_scale;
  const double ly = std::log(y);
  const double ph = -ct.h * ly;
  std::complex<double> step = std::polar(1.0, ph), z = 1.0;
  std::complex<double> s = 0;
  const size_t J = ct.w.size() - 1;
  for (size_t j = 0; j <= J; ++j) {
    if (j % 32 == 0) z = std::polar(1.0, ph * double(j));
    s += ct.w[j] * z;
    z *= step;
  }
  const double scale = ct.h / kPi * std::exp(-ct.sigma * ly);
  Certified out;
  out.value = scale * s.real() + (ct.sigma < 0 ? 1.0 : 0.0);
  double disc = std::exp(ct.log_disc + strip_log_max(ct, ly));
  double trunc = std::exp(-ct.sigma * ly + log_gamma_factor(ct.sigma) + c * ct.sigma * ct.sigma -
                          std::log(std::fabs(ct.sigma)) - std::log(kPi) + ct.log_erfc);
  double round = scale * ct.abs_sum * (ct.rel_err + 4 * kEps * double(J + 32)) + 2 * kEps;
  out.cert = disc + trunc + round;
  if (!(disc + trunc <= tol_ * std::max(1.0, std::fabs(out.value))))
    throw UncertifiedError("V quadrature not certified", disc + trunc);
  return out;
}

Certified VFunction::operator()(double y) const {
  if (!(y > 0) || !std::isfinite(y)) throw Error("V requires y > 0");
  return y < 1 ? eval(lo_, y) : eval(hi_, y);
}

double VFunction::envelope(double y) const {
  double ly = std::log(y), best = INFINITY;
  for (size_t i = 0; i < env_sigma_.size(); ++i) best = std::min(best, env_phi_[i] - env_sigma_[i] * ly);
  return std::exp(best);
}

double VFunction::Sweep::operator()(double y) {
  const auto& s = v_.env_sigma_;
  const auto& f = v_.env_phi_;
  double ly = std::log(y);
  // phi is convex in sigma, so the minimizer moves right as log y grows
  while (idx_ + 1 < s.size() && f[idx_ + 1] - s[idx_ + 1] * ly <= f[idx_] - s[idx_] * ly) ++idx_;
  return std::exp(f[idx_] - s[idx_] * ly);
}

Certified v_function(double y, const VParams& p, double tol) { return VFunction(p, tol)(y); }

RankinSeries b_coefficients(const Eigenform& f, const NewformRecord& g, size_t M) {
  if (f.length() < M || g.length() < M)
    throw Error("insufficient coefficients for b_m up to " + std::to_string(M));
  RankinSeries r;
  r.k = f.weight;
  r.l = g.weight;
  r.level = g.level;
  r.b.assign(M + 1, 0.0);
  for (size_t d = 1; d * d <= M; ++d) {
    if (std::gcd(long(d), g.level) != 1) continue;
    for (size_t n = 1; n * d * d <= M; ++n) r.b[n * d * d] += f.C[n] * g.C[n];
  }
  return r;
}

std::vector<uint32_t> divisor_function_table(int r, size_t K) {
  if (r < 1 || r > 8) throw Error("divisor_function_table: r out of range");
  // d_r(p^e) = binom(e + r - 1, r - 1)
  auto local = [r](uint32_t e) {
    uint64_t num = 1, den = 1;
    for (int i = 1; i < r; ++i) {
      num *= e + i;
      den *= i;
    }
    return uint32_t(num / den);
  };
  std::vector<uint32_t> d(K + 1, 0), spf(K + 1, 0);
  std::vector<uint8_t> ex(K + 1, 0);
  std::vector<uint32_t> primes;
  if (K >= 1) d[1] = 1;
  for (size_t i = 2; i <= K; ++i) {
    if (spf[i] == 0) {
      spf[i] = uint32_t(i);
      primes.push_back(uint32_t(i));
      ex[i] = 1;
      d[i] = local(1);
    }
    for (uint32_t p : primes) {
      size_t n = i * p;
      if (p > spf[i] || n > K) break;
      spf[n] = p;
      if (p == spf[i]) {
        ex[n] = ex[i] + 1;
        d[n] = d[i] / local(ex[i]) * local(ex[n]);
      } else {
        ex[n] = 1;
        d[n] = d[i] * local(1);
      }
    }
  }
  return d;
}

namespace {

// Bound on sum_{m > K} d_r(m) m^-s |V(y0 m)| by
// e^phi(sigma) y0^-sigma K^(s0 - sigma - s) zeta(s0)^r with 1 < s0 < sigma + s.
double rankin_remainder(const VFunction& V, double y0, double s, int r, size_t K) {
  const auto& sg = V.envelope_sigmas();
  const auto& ph = V.envelope_phis();
  double lK = std::log(double(K)), best = INFINITY;
  for (double s0 = 1.02; s0 < 8; s0 *= 1.03) {
    double lz = r * std::log(riemann_zeta(s0));
    for (size_t i = 0; i < sg.size(); ++i) {
      if (sg[i] + s <= s0) continue;
      best = std::min(best, ph[i] - sg[i] * std::log(y0) + (s0 - sg[i] - s) * lK + lz);
    }
  }
  return std::exp(best);
}

std::vector<double> weighted_terms(const VFunction& V, double y0, double s, int r, size_t K) {
  auto d = divisor_function_table(r, K);
  std::vector<double> t(K + 1, 0.0);
  VFunction::Sweep env(V);
  for (size_t m = 1; m <= K; ++m) t[m] = d[m] * std::pow(double(m), -s) * env(y0 * double(m));
  return t;
}

}  // namespace

double divisor_weighted_tail(const VFunction& V, double y0, double s, int r, size_t M) {
  size_t K = std::max<size_t>(8 * M, 1024);
  auto t = weighted_terms(V, y0, s, r, K);
  double sum = rankin_remainder(V, y0, s, r, K);
  for (size_t m = K; m > M; --m) sum += t[m];
  return sum * (1 + 1e-12);
}

size_t effective_cutoff(const VFunction& V, double tol) {
  if (std::isinf(tol)) return 1;
  if (!(tol > 0)) throw Error("effective_cutoff: tol must be positive");
  const double y0 = V.y_unit();
  for (size_t K = 1024; K <= (size_t(1) << 31); K *= 4) {
    double S = 2 * rankin_remainder(V, y0, 0.5, 4, K) * (1 + 1e-12);
    if (!(S < tol)) continue;
    auto t = weighted_terms(V, y0, 0.5, 4, K);
    for (size_t m = K; m >= 1; --m) {
      if (S + 2 * t[m] * (1 + 1e-12) >= tol) return m;
      S += 2 * t[m] * (1 + 1e-12);
    }
    return 1;
  }
  throw Error("effective_cutoff: no cutoff below 2^31");
}

size_t effective_cutoff(const VParams& p, double tol) {
  if (std::isinf(tol)) return 1;
  return effective_cutoff(VFunction(p), tol);
}

VTable make_v_table(const VFunction& V, size_t M) {
  VTable t;
  t.params = V.params();
  t.v.assign(M + 1, 0.0);
  t.cert.assign(M + 1, 0.0);
  const double y0 = V.y_unit();
  for (size_t m = 1; m <= M; ++m) {
    auto c = V(y0 * double(m));
    t.v[m] = c.value;
    t.cert[m] = c.cert;
  }
  t.tail = 2 * divisor_weighted_tail(V, y0, 0.5, 4, M);
  return t;
}

Certified central_value(const Eigenform& f, const NewformRecord& g, const VTable& table) {
  const auto& p = table.params;
  if (p.k.size() != 1 || p.k[0] != f.weight || p.l[0] != g.weight || p.conductor != double(g.level))
    throw Error("V table does not match the pair of forms");
  size_t M = table.length();
  auto b = b_coefficients(f, g, M);
  double sum = 0, comp = 0, abs_sum = 0, vcert = 0;
  for (size_t m = 1; m <= M; ++m) {
    double w = 2 * b.b[m] / std::sqrt(double(m));
    double term = w * table.v[m];
    double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    abs_sum += std::fabs(term);
    vcert += std::fabs(w) * table.cert[m];
  }
  Certified out;
  out.value = sum + comp;
  out.cert = table.tail + vcert + 64 * kEps * abs_sum;
  return out;
}

Certified central_value(const Eigenform& f, const NewformRecord& g, const CentralValueOptions& opt) {
  VParams p = VParams::degree_one(f.weight, g.weight, double(g.level));
  p.g_scale = opt.g_scale;
  p.contour = opt.contour;
  VFunction V(p, std::min(1e-14, opt.tol * 1e-3));
  size_t M = opt.cutoff ? opt.cutoff : effective_cutoff(V, opt.tol / 2);
  return central_value(f, g, make_v_table(V, M));
}

}  // namespace rsm
