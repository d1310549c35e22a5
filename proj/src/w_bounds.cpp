#include "rhobound/w_bounds.hpp"

#include <algorithm>
#include <cmath>

namespace rhobound {

namespace {

// Off-set one-step factor (lambda*d + 2L + 1)/(d + 1); below one exactly when
// d > 2L/(1 - lambda).
double off_set_factor(const ContractionCertificate& cert) {
  return (cert.lambda * cert.d + 2.0 * cert.L + 1.0) / (cert.d + 1.0);
}

}  // namespace

void validate_certificate(const ContractionCertificate& cert) {
  if (!(cert.gamma >= 0.0) || !(cert.gamma < 1.0))
    throw ConfigError("certificate: gamma must lie in [0, 1)");
  if (!(cert.gamma0 >= 0.0) || !std::isfinite(cert.gamma0))
    throw ConfigError("certificate: gamma0 must be finite and nonnegative");
  if (!(cert.lambda >= 0.0) || !(cert.lambda < 1.0))
    throw ConfigError("certificate: lambda must lie in [0, 1)");
  if (!(cert.L >= 0.0) || !std::isfinite(cert.L))
    throw ConfigError("certificate: L must be finite and nonnegative");
  if (!(cert.c > 0.0) || !std::isfinite(cert.c))
    throw ConfigError("certificate: c must be finite and positive");
  if (!std::isfinite(cert.d) || !(cert.d > 0.0))
    throw ConfigError("certificate: d must be finite and positive");
  if (!(cert.d > 2.0 * cert.L / (1.0 - cert.lambda)))
    throw InfeasibleError("certificate: level d must exceed 2L/(1-lambda)");
}

double classical_bound(double c_x, double gamma, int m) {
  if (!(c_x >= 0.0) || !std::isfinite(c_x))
    throw ConfigError("classical_bound: c_x must be finite and nonnegative");
  if (!(gamma >= 0.0) || !(gamma < 1.0))
    throw ConfigError("classical_bound: gamma must lie in [0, 1)");
  if (m < 0) throw ConfigError("classical_bound: step count must be nonnegative");
  double value = c_x / (1.0 - gamma);
  for (int i = 0; i < m; ++i) value *= gamma;
  return value;
}

AdmissibleInterval admissible_a_interval(const ContractionCertificate& cert) {
  validate_certificate(cert);
  const double log_b = std::log(2.0 * cert.L + 1.0);
  double lo = 0.0;
  if (log_b > 0.0) {
    // gamma = 0 pushes the lower end to zero.
    lo = cert.gamma == 0.0 ? 0.0 : log_b / (log_b - std::log(cert.gamma));
  }
  double hi = 1.0;
  if (cert.gamma0 > 1.0) {
    const double log_r = std::log(off_set_factor(cert));
    hi = log_r / (log_r - std::log(cert.gamma0));
  }
  AdmissibleInterval out;
  out.lo = lo;
  out.hi = hi;
  out.empty = !(lo < hi);
  return out;
}

double general_rate(const ContractionCertificate& cert, double a) {
  const AdmissibleInterval iv = admissible_a_interval(cert);
  if (iv.empty || !(a > iv.lo) || !(a < iv.hi))
    throw ConfigError("general_rate: exponent outside admissible interval");
  const double log_b = std::log(2.0 * cert.L + 1.0);
  const double on_set = cert.gamma == 0.0
                            ? 0.0
                            : std::exp(a * std::log(cert.gamma) + (1.0 - a) * log_b);
  const double log_r = std::log(off_set_factor(cert));
  const double off_set = cert.gamma0 == 0.0
                             ? 0.0
                             : std::exp(a * std::log(cert.gamma0) + (1.0 - a) * log_r);
  return std::max(on_set, off_set);
}

double general_prefactor(const ContractionCertificate& cert, double V_x,
                         double rho_a) {
  validate_certificate(cert);
  if (!(V_x >= 0.0) || !std::isfinite(V_x))
    throw ConfigError("general_prefactor: V_x must be finite and nonnegative");
  if (!(rho_a >= 0.0) || !(rho_a < 1.0))
    throw ConfigError("general_prefactor: rho_a must lie in [0, 1)");
  return cert.c * ((cert.lambda + 1.0) * V_x + cert.L + 1.0) / (1.0 - rho_a);
}

RateSelection select_rate(const ContractionCertificate& cert) {
  const AdmissibleInterval iv = admissible_a_interval(cert);
  if (iv.empty)
    throw InfeasibleError("select_rate: admissible exponent interval is empty");
  constexpr int kGrid = 256;
  RateSelection out;
  out.a_grid.resize(kGrid);
  out.rho_curve.resize(kGrid);
  const double span = iv.hi - iv.lo;
  int best = 0;
  for (int i = 0; i < kGrid; ++i) {
    // Strictly interior points; the interval is open at both ends.
    const double a = iv.lo + span * (i + 1) / (kGrid + 1);
    const double rho = general_rate(cert, a);
    out.a_grid[i] = a;
    out.rho_curve[i] = rho;
    if (rho < out.rho_curve[best]) best = i;
  }
  out.a = out.a_grid[best];
  out.rho = out.rho_curve[best];
  return out;
}

TvCurve madras_tv_from_w(double c_lip, const std::vector<double>& w_curve) {
  if (!(c_lip >= 0.0) || !std::isfinite(c_lip))
    throw ConfigError("madras_tv_from_w: c_lip must be finite and nonnegative");
  TvCurve out;
  if (w_curve.size() < 2) return out;
  out.tv.resize(w_curve.size() - 1);
  for (std::size_t j = 0; j + 1 < w_curve.size(); ++j) {
    if (!(w_curve[j] >= 0.0))
      throw ConfigError("madras_tv_from_w: w_curve must be nonnegative");
    const double v = 0.5 * c_lip * w_curve[j];
    if (v > 1.0) {
      out.tv[j] = 1.0;
      out.clamped = true;
    } else {
      out.tv[j] = v;
    }
  }
  return out;
}

}  // namespace rhobound
