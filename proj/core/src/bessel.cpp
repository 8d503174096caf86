#include <cmath>
#include <complex>

#include "rsmoment/error.hpp"
#include "rsmoment/specialfn.hpp"

namespace rsm {

namespace {

// (x/2)^n / n! as a running product; returns 0 once it drops below the
// 1e-300 floor.
double leading_term(int n, double x) {
  double t = 1.0;
  double h = 0.5 * x;
  for (int j = 1; j <= n; ++j) {
    t *= h / j;
    if (t < 1e-300) return 0.0;
  }
  return t;
}

double series(int n, double x, double tol) {
  double lead = leading_term(n, x);
  if (lead == 0.0) return 0.0;
  double q = -0.25 * x * x;
  // Neumaier-compensated sum of q^j / (j! (n+1)_j)
  double sum = 1.0, comp = 0.0, term = 1.0;
  for (int j = 1; j < 2000; ++j) {
    term *= q / (double(j) * double(n + j));
    double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
    if (std::fabs(term) < tol * std::fabs(sum)) break;
  }
  return lead * (sum + comp);
}

// Hankel asymptotic expansion for J_0, J_1; accurate to double precision
// for x >= 25.
void hankel01(double x, double& j0, double& j1) {
  double pq[2][2];
  for (int nu = 0; nu < 2; ++nu) {
    double mu = 4.0 * nu * nu;
    double P = 0, Q = 0;
    double a = 1.0;  // a_k(nu) / x^k
    double prev = INFINITY;
    for (int k = 0; k < 60; ++k) {
      if (k > 0) a *= (mu - double(2 * k - 1) * double(2 * k - 1)) / (8.0 * k * x);
      double mag = std::fabs(a);
      if (mag > prev) break;
      prev = mag;
      // P collects even k with sign (-1)^(k/2), Q odd k with sign (-1)^((k-1)/2)
      if (k % 2 == 0)
        P += ((k / 2) % 2 ? -a : a);
      else
        Q += (((k - 1) / 2) % 2 ? -a : a);
      if (mag < 1e-18) break;
    }
    pq[nu][0] = P;
    pq[nu][1] = Q;
  }
  double s = std::sin(x), c = std::cos(x);
  const double r = std::sqrt(2.0 / (kPi * x));
  const double h = 0.70710678118654752440084436210484904;
  // chi_0 = x - pi/4, chi_1 = x - 3pi/4
  double c0 = (c + s) * h, s0 = (s - c) * h;
  double c1 = (s - c) * h, s1 = -(c + s) * h;
  j0 = r * (pq[0][0] * c0 - pq[0][1] * s0);
  j1 = r * (pq[1][0] * c1 - pq[1][1] * s1);
}

double forward(int n, double x) {
  double j0, j1;
  hankel01(x, j0, j1);
  if (n == 0) return j0;
  double jm = j0, jc = j1;
  for (int m = 1; m < n; ++m) {
    double jn = (2.0 * m / x) * jc - jm;
    jm = jc;
    jc = jn;
  }
  return jc;
}

double miller(int n, double x) {
  double top = std::max(double(n), x);
  int N = static_cast<int>(top + 20 + std::sqrt(160.0 * top));
  if (N % 2) ++N;
  double jp = 0.0, jc = 1e-30, ans = 0.0, norm = 0.0;
  for (int m = N; m > 0; --m) {
    double jm = (2.0 * m / x) * jc - jp;
    jp = jc;
    jc = jm;  // now holds J_{m-1} up to scale
    if (std::fabs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      ans *= 1e-250;
      norm *= 1e-250;
    }
    if (m - 1 == n) ans = jc;
    if ((m - 1) % 2 == 0 && m - 1 > 0) norm += 2.0 * jc;
  }
  norm += jc;
  return ans / norm;
}

}  // namespace

double bessel_series_bound(int order, double x) {
  if (x <= 0) return order == 0 ? 1.0 : 0.0;
  return std::exp(order * std::log(0.5 * x) - std::lgamma(order + 1.0));
}

double bessel_uniform_bound(int order) {
  if (order <= 0) return 1.0;
  return 0.674886 * std::pow(double(order), -1.0 / 3.0);
}

double bessel_j(int order, double x, const PrecisionContext& ctx) {
  if (order < 0) throw Error("bessel_j requires order >= 0");
  if (!(x >= 0)) throw Error("bessel_j requires x >= 0");
  if (x == 0) return order == 0 ? 1.0 : 0.0;
  const int n = order;
  if (x * x <= 2.0 * (n + 1)) return series(n, x, std::min(ctx.target_rel_tol, 1e-17));
  if (x >= 25.0 && x >= n) return forward(n, x);
  return miller(n, x);
}

double bessel_j_mellin_barnes(int order, double x, const PrecisionContext& ctx) {
  if (order < 4) throw Error("Mellin-Barnes cross-check needs order >= 4");
  if (!(x > 0)) throw Error("Mellin-Barnes cross-check needs x > 0");
  const double n = order;
  // Near the first pole at s = n the integrand is of the size of J_n itself,
  // which avoids cancellation when x is small.
  const double sigma = x <= n ? n - 0.5 : 0.5 * n;
  const double logx2 = std::log(0.5 * x);
  auto integrand = [&](double t) {
    std::complex<double> a{(n - sigma) / 2, -t / 2};
    std::complex<double> b{(n + sigma) / 2 + 1, t / 2};
    std::complex<double> e = log_gamma(a) - log_gamma(b) + std::complex<double>{sigma, t} * logx2;
    return std::exp(e).real();
  };
  // |integrand| ~ (x/2)^sigma (t/2)^(-sigma-1) for large t.
  double scale = std::exp(sigma * logx2 + std::lgamma((n - sigma) / 2) - std::lgamma((n + sigma) / 2 + 1));
  double tol = std::max(ctx.target_rel_tol * 1e-3 * std::min(1.0, scale), 1e-300);
  double T = 2.0 * std::pow(std::exp(sigma * logx2) * 2.0 / (sigma * tol), 1.0 / sigma);
  T = std::min(std::max(T, 40.0), 2e5);
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double width = 0.25;
  double sum = 0;
  for (double lo = 0; lo < T; lo += width) {
    double mid = lo + 0.5 * width, half = 0.5 * width;
    double panel = 0;
    for (int i = 0; i < 8; ++i) panel += gw[i] * integrand(mid + half * gx[i]);
    sum += panel * half;
  }
  return sum / (2.0 * kPi);
}

}  // namespace rsm
