#pragma once

// Self-contained reference implementations used to cross-check library
// results. Nothing here includes library headers beyond the complex alias,
// so agreement is evidence, not tautology.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation refined with one Halley step.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

inline double cauchy_cdf(double x) { return 0.5 + std::atan(x) / M_PI; }

inline double exponential_cdf(double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }

// Cumulant rates from the exponent by central differences:
// kappa1/t = -Im psi'(0), kappa2/t = Re psi''(0).
inline double fd_mean_rate(const std::function<std::complex<double>(double)>& psi,
                           double eps = 1e-4) {
  return -std::imag(psi(eps) - psi(-eps)) / (2 * eps);
}

inline double fd_var_rate(const std::function<std::complex<double>(double)>& psi,
                          double eps = 1e-4) {
  return std::real(psi(eps) - 2.0 * psi(0.0) + psi(-eps)) / (eps * eps);
}

// Frozen reference values, each recomputed here from first principles in an
// independent environment before being pinned.
namespace frozen {
// 2(ln cosh(1/2) - ln cos(0)) for the Meixner exponent at xi=1, a=1,b=0,r=1,m=0
inline constexpr double meixner_psi_1 = 0.24022901391655488;
// Meixner exponent at xi=0.7, a=1.3, b=0.5, r=0.8, m=0.2
inline constexpr double meixner_psi_07_re = 0.16961248697924858;
inline constexpr double meixner_psi_07_im = -0.31335959099820176;
// NIG exponent at xi=1, alpha=1, beta=-0.25, delta=1, mu=0
inline constexpr double nig_psi_1_re = 0.4350496284514651;
inline constexpr double nig_psi_1_im = 0.1781520757636088;
// NIG cumulant rates for alpha=1, beta=-0.3, delta=1, mu=0
inline constexpr double nig_mean_rate = -0.3144854510165755;
inline constexpr double nig_var_rate = 1.151961359035075;
// Meixner variance rate for a=1, b=0, r=1: a^2 r / (2 cos^2(b/2))
inline constexpr double meixner_var_rate = 0.5;
// Euler terminal values (1+h)^(1/h) for the drift family a(x)=x, x0=1, T=1
inline constexpr double drift_terminal_h2 = 2.7048138294215285;
inline constexpr double drift_terminal_h3 = 2.7169239322355936;
inline constexpr double drift_terminal_h4 = 2.7181459268249255;
// preset stable-like alpha(x) at x = 1; alpha(0)=1, alpha(2)=1.95, alpha(4)=1
inline constexpr double stable_like_alpha_1 = 1.475;
// preset Meixner-like a(0) = 1 + 10 exp(-1/25)
inline constexpr double meixner_like_a0 = 10.607894391523232;
// preset NIG-like beta(10) = -atan(10)/pi and drift rate beta/sqrt(1-beta^2)
inline constexpr double nig_like_beta_10 = -0.4682744825694465;
inline constexpr double nig_like_drift_10 = -0.5299722326629241;
// inverse Kolmogorov CDF at 0.99 (two-sided KS critical coefficient, 1%)
inline constexpr double ks_coeff_1pct = 1.6276236115189495;
}  // namespace frozen

}  // namespace oracle
