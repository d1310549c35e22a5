#include "rhobound/re_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rhobound/errors.hpp"

namespace rhobound {

namespace {

void check_data(const REData& data) {
  if (data.p < 1 || data.r < 1)
    throw ConfigError("re data: need p >= 1 and r >= 1");
  if (data.group_means.size() != data.p)
    throw ConfigError("re data: group mean count must equal p");
  if (!(data.a1 > 0.0) || !(data.b1 > 0.0) || !(data.a2 > 0.0) ||
      !(data.b2 > 0.0))
    throw ConfigError("re data: prior hyperparameters must be positive");
  if (!(data.ssw >= 0.0) || !std::isfinite(data.ssw))
    throw ConfigError("re data: within-group sum of squares must be >= 0");
}

double between_ss(const REData& data) {
  return (data.group_means.array() - data.grand_mean).square().sum();
}

void check_denominator(double value, const char* what) {
  if (!(value > 0.0))
    throw ConfigError(std::string("re constants: nonpositive denominator in ") +
                      what);
}

double check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("re constants: need delta > 0");
  return delta;
}

}  // namespace

ReDriftConstants re_drift_constants(const REData& data) {
  check_data(data);
  if (data.p < 2) throw ConfigError("re drift: need p >= 2");
  const double p = data.p;
  const double r = data.r;
  const double den_e = r * p + 2.0 * data.a2 - 2.0;
  const double den_t = p + 2.0 * data.a1 - 2.0;
  check_denominator(den_e, "the error-precision term");
  check_denominator(den_t, "the effects-precision term");

  ReDriftConstants out;
  out.lambda = (2.0 * p + 4.0) / den_e + 4.0 / den_t;
  out.L = ((p + 2.0 * data.a1 + 2.0) * between_ss(data) + 4.0 * data.b1) /
              (p * den_t) +
          (p + 2.0) / (p * r) * (data.ssw + 2.0 * data.b2) / den_e;
  return out;
}

double v_re(const REData& data, const Eigen::VectorXd& eta) {
  check_data(data);
  if (eta.size() != data.p + 1)
    throw ConfigError("re drift value: state must have p + 1 coordinates");
  const double p = data.p;
  double acc = 0.0;
  for (int i = 0; i < data.p; ++i) {
    const double u = eta(i + 1) + data.grand_mean - data.group_means(i);
    acc += u * u;
  }
  const double global = eta(0) / std::sqrt(p) - data.grand_mean;
  return acc / p + global * global;
}

double re_varrho(const REData& data, double b2_val) {
  check_data(data);
  if (data.p < 4) throw ConfigError("re contraction functional: need p >= 4");
  if (!(b2_val >= data.b2))
    throw ConfigError(
        "re contraction functional: scale argument below the prior scale");
  const double p = data.p;
  const double r = data.r;
  const double half_t = p / 2.0 + data.a1;       // effects-precision shape
  const double half_e = r * p / 2.0 + data.a2;   // error-precision shape
  check_denominator(half_t - 1.0, "a first-moment term");
  check_denominator(half_e - 2.0, "a second-moment term");

  // b2_val enters only through the two capped terms, so +inf saturates both.
  const double sq_cap =
      std::min(b2_val * b2_val * half_t * (half_t + 1.0) /
                   (r * r * data.b1 * data.b1 * (half_e - 1.0) * (half_e - 2.0)),
               1.0);
  const double lin_cap = std::min(b2_val * p / (data.b1 * r * (half_e - 1.0)),
                                  p / (half_t - 1.0));
  const double brace =
      4.0 / data.b1 * sq_cap + 8.0 * half_t / (data.b1 * (half_e - 1.0));
  return brace * between_ss(data) + 5.0 / (half_t - 1.0) +
         4.0 / (half_e - 1.0) + lin_cap + 2.0 * p / (half_e - 1.0);
}

ReContraction re_contraction(const REData& data, double delta) {
  check_delta(delta);
  const double b2_cap = data.b2 + data.ssw / 2.0 +
                        data.r * std::pow(double(data.p), 1.0 + delta / 2.0);
  ReContraction out;
  out.gamma = std::sqrt(re_varrho(data, b2_cap));
  out.gamma0 =
      std::sqrt(re_varrho(data, std::numeric_limits<double>::infinity()));
  return out;
}

ReValidity re_validity(const REData& data, double delta) {
  check_delta(delta);
  const ReDriftConstants drift = re_drift_constants(data);
  const ReContraction contraction = re_contraction(data, delta);
  const double d = std::pow(double(data.p), delta / 2.0);
  ReValidity out;
  out.drift_ok = drift.lambda < 1.0;
  out.contraction_ok = contraction.gamma < 1.0;
  out.small_set_ok =
      out.drift_ok && d > 2.0 * drift.L / (1.0 - drift.lambda);
  return out;
}

ReCertificate re_rate(const REData& data, double delta, int a_grid) {
  check_delta(delta);
  if (a_grid < 1) throw ConfigError("re rate: need at least one grid point");
  const ReDriftConstants drift = re_drift_constants(data);
  const ReContraction contraction = re_contraction(data, delta);
  if (!(drift.lambda < 1.0))
    throw InfeasibleError("re rate: drift factor is not below one");
  if (!(contraction.gamma < 1.0))
    throw InfeasibleError(
        "re rate: small-set contraction factor is not below one");

  ContractionCertificate cert;
  cert.gamma = contraction.gamma;
  cert.gamma0 = contraction.gamma0;
  cert.lambda = drift.lambda;
  cert.L = drift.L;
  cert.d = std::pow(double(data.p), delta / 2.0);
  cert.c = 2.0 * data.p;
  validate_certificate(cert);  // InfeasibleError when the small set is too small

  const AdmissibleInterval iv = admissible_a_interval(cert);
  const double cap = std::min(delta / (1.0 + delta), 2.0 / 3.0);
  const double lo = iv.lo;
  const double hi = std::min(iv.hi, cap);
  if (iv.empty || !(lo < hi))
    throw InfeasibleError("re rate: empty exponent interval for this regime");

  ReCertificate out;
  out.lambda = drift.lambda;
  out.L = drift.L;
  out.gamma = contraction.gamma;
  out.gamma0 = contraction.gamma0;
  out.delta = delta;
  out.rho_a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a_grid; ++i) {
    const double a = lo + (hi - lo) * (i + 1) / (a_grid + 1);
    const double rho = general_rate(cert, a);
    if (rho < out.rho_a) {
      out.rho_a = rho;
      out.a = a;
    }
  }
  out.tv_coeff = re_tv_lipschitz(data);
  return out;
}

double re_tv_lipschitz(const REData& data) {
  check_data(data);
  if (data.p < 2) throw ConfigError("re kernel coefficient: need p >= 2");
  const double p = data.p;
  const double r = data.r;
  const double a1 = data.a1, b1 = data.b1;
  const double a2 = data.a2, b2 = data.b2;

  // (1 + x)^n with n*x of order one: go through log1p to keep precision.
  const double x1 = std::sqrt(2.0 / b1) / p + 1.0 / (2.0 * b1 * p * p);
  const double c1 = 2.0 / p * (p / 2.0 + a1) *
                    std::exp((p / 2.0 + a1 - 1.0) * std::log1p(x1)) *
                    (std::sqrt(2.0 / b1) + 1.0 / (b1 * p));
  const double x2 =
      2.0 / (std::sqrt(b2) * r * p) + 1.0 / (b2 * r * r * p * p);
  const double c2 = 2.0 * std::pow(r, -1.5) / p * (r * p / 2.0 + a2) *
                    std::exp((r * p / 2.0 + a2 - 1.0) * std::log1p(x2)) *
                    (2.0 * std::sqrt(r / b2) + 2.0 / (b2 * std::sqrt(r) * p));
  return (c1 + c2) * std::pow(r, 1.5) * p;
}

}  // namespace rhobound
