#include "rhobound/special_functions.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace rhobound {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogHalf = -0.69314718055994530942;
constexpr double kMaxBelowOne = 1.0 - 0x1.0p-53;

// log(u) for u in (0,1) without precision loss near 1.
double accurate_log(double u) {
  return u >= 0.5 ? std::log1p(u - 1.0) : std::log(u);
}

// Acklam's rational approximation to Phi^{-1}; |relative error| < 1.2e-9
// over the whole open interval, refined afterwards by the callers.
double quantile_estimate(double u) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  if (u < plow) {
    double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = u - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Phi^{-1} on (0, ~0.5]; Halley steps in probability space where phi is
// representable, Newton steps on log Phi deeper in the tail.
double quantile_lower_half(double u) {
  double x = quantile_estimate(u);
  if (u >= 1e-280) {
    for (int i = 0; i < 2; ++i) {
      double r = (std_normal_cdf(x) - u) / std_normal_pdf(x);
      x -= r / (1.0 + 0.5 * x * r);
    }
    return x;
  }
  double target = std::log(u);
  for (int i = 0; i < 3; ++i) {
    x -= (log_std_normal_cdf(x) - target) * mills_ratio(-x);
  }
  return x;
}

// Solves log Phi(m - s) = log Phi(m) + L for s > 0, given L < 0.  The
// series branch covers s << |m| + 1, where forming s as a difference of
// quantiles would cancel catastrophically (and could even come out
// non-positive); elsewhere the quantile route is exact enough.
double tn_offset(double L, double m) {
  double h = std_normal_hazard(m);
  if (h > 0.0 && std::isfinite(h)) {
    double r = -L / h;
    if (r * (1.0 + std::abs(m + h)) < 1e-5) {
      double s = r * (1.0 - 0.5 * (m + h) * r);
      return s > DBL_MIN ? s : DBL_MIN;
    }
  }
  double t = std_normal_quantile_logp(log_std_normal_cdf(m) + L);
  double s = m - t;
  if (!(s > 0.0)) {
    s = h > 0.0 ? std::fmax(-L / h, DBL_MIN) : DBL_MIN;
  }
  return s;
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double log_std_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_std_normal_cdf(double x) {
  if (x >= 0.0) {
    return std::log1p(-std_normal_cdf(-x));
  }
  if (x > -37.0) {
    // erfc keeps relative accuracy down to the underflow threshold
    return std::log(std_normal_cdf(x));
  }
  return log_std_normal_pdf(x) + std::log(mills_ratio(-x));
}

double mills_ratio(double z) {
  if (!(z >= 0.0)) {
    throw std::domain_error("mills_ratio: argument must be >= 0");
  }
  if (z < 17.0) {
    return std_normal_cdf(-z) / std_normal_pdf(z);
  }
  // Phi(-z)/phi(z) = 1/(z + 1/(z + 2/(z + 3/(...)))), modified Lentz
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = tiny;
  double d = 0.0;
  for (int n = 1; n <= 300; ++n) {
    double an = n == 1 ? 1.0 : static_cast<double>(n - 1);
    d = z + an * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return f;
}

double std_normal_hazard(double x) {
  if (x >= -8.0) {
    return std_normal_pdf(x) / std_normal_cdf(x);
  }
  return 1.0 / mills_ratio(-x);
}

double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("std_normal_quantile: u must lie in (0,1)");
  }
  if (u > 0.5) {
    return -quantile_lower_half(1.0 - u);
  }
  return quantile_lower_half(u);
}

double std_normal_quantile_logp(double log_u) {
  if (!(log_u < 0.0)) {
    throw std::domain_error("std_normal_quantile_logp: log_u must be < 0");
  }
  if (log_u > kLogHalf) {
    return -quantile_lower_half(-std::expm1(log_u));
  }
  if (log_u >= -644.0) {
    return quantile_lower_half(std::exp(log_u));
  }
  // asymptotic seed: x^2 satisfies t = -2L - log(2 pi t)
  double t = -2.0 * log_u;
  for (int i = 0; i < 3; ++i) {
    t = -2.0 * log_u - kLog2Pi - std::log(t);
  }
  double x = -std::sqrt(t);
  for (int i = 0; i < 4; ++i) {
    x -= (log_std_normal_cdf(x) - log_u) * mills_ratio(-x);
  }
  return x;
}

double tn_inv_cdf(double u, double mu, TruncSide side) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("tn_inv_cdf: u must lie in (0,1)");
  }
  if (side == TruncSide::positive) {
    return tn_offset(std::log1p(-u), mu);
  }
  return -tn_offset(accurate_log(u), -mu);
}

double s_fn(double u, double mu) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("s_fn: u must lie in (0,1)");
  }
  double lu = accurate_log(u);
  double w = std_normal_quantile_logp(log_std_normal_cdf(mu) + lu);
  // u phi(mu)/phi(w) = exp(lu + (w^2 - mu^2)/2)
  double s = -std::expm1(lu + 0.5 * (w - mu) * (w + mu));
  if (mu <= 0.0) {
    double cap = 1.0 - u;  // analytic bound; guards float rounding
    if (s > cap) s = cap;
  }
  if (s < DBL_MIN) s = DBL_MIN;
  if (s > kMaxBelowOne) s = kMaxBelowOne;
  return s;
}

double xi_fn(double mu) {
  double v;
  if (mu <= -26.0) {
    // asymptotic expansion in 1/mu^2; the closed form loses all digits here
    double z2 = 1.0 / (mu * mu);
    v = z2 * (1.0 + z2 * (-6.0 + z2 * (50.0 + z2 * (-518.0 + z2 * (6354.0 - 89782.0 * z2)))));
  } else {
    double h = std_normal_hazard(mu);
    v = 1.0 - h * (mu + h);
  }
  if (v < DBL_MIN) v = DBL_MIN;
  if (v > kMaxBelowOne) v = kMaxBelowOne;
  return v;
}

double tn_variance(double mu, TruncSide side) {
  return side == TruncSide::positive ? xi_fn(mu) : xi_fn(-mu);
}

double same_cov_gaussian_tv(double delta) {
  if (!(delta >= 0.0)) {
    throw std::domain_error("same_cov_gaussian_tv: delta must be >= 0");
  }
  // 2 - 4 Phi(-delta/2) without the subtraction
  return 2.0 * std::erf(0.5 * delta * kInvSqrt2);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::domain_error("regularized_gamma_p: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  double log_scale = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 600; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return std::fmin(sum * std::exp(log_scale), 1.0);
  }
  // upper tail via modified Lentz
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 600; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_scale) * h;
}

double chi2_cdf(double x, double dof) {
  if (!(dof > 0.0)) {
    throw std::domain_error("chi2_cdf: dof must be > 0");
  }
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double u, double dof) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("chi2_quantile: u must lie in (0,1)");
  }
  if (!(dof > 0.0)) {
    throw std::domain_error("chi2_quantile: dof must be > 0");
  }
  // Wilson-Hilferty seed
  double z = std_normal_quantile(u);
  double g = 2.0 / (9.0 * dof);
  double a = 0.5 * dof;
  double cube = 1.0 - g + z * std::sqrt(g);
  double x = dof * cube * cube * cube;
  if (!(x > 0.0)) {
    // small-quantile inversion of P(a, x/2) ~ (x/2)^a / Gamma(a+1)
    x = 2.0 * std::exp((std::log(u) + std::lgamma(a + 1.0)) / a);
  }
  double lo = 0.0;
  double hi = HUGE_VAL;
  double log_norm = -a * std::log(2.0) - std::lgamma(a);
  for (int i = 0; i < 100; ++i) {
    double f = chi2_cdf(x, dof) - u;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double pdf = std::exp(log_norm + (a - 1.0) * std::log(x) - 0.5 * x);
    double next = pdf > 0.0 ? x - f / pdf : x;
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * (lo + 1.0);
    }
    bool converged = std::abs(next - x) <= 1e-13 * (x + 1.0);
    x = next;
    if (converged) break;
  }
  return x;
}

}  // namespace rhobound
