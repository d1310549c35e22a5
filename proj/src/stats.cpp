#include "rhobound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rhobound/errors.hpp"

namespace rhobound {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("fit_line: need two equal-length samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    throw ConfigError("fit_line: abscissae are all identical");
  }
  double slope = sxy / sxx;
  double ss_res = syy - slope * sxy;
  double r2 = syy > 0.0 ? 1.0 - std::fmax(ss_res, 0.0) / syy : 1.0;
  return {slope, my - slope * mx, r2};
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ConfigError("ks_two_sample_pvalue: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::fmax(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  double sign = 1.0;
  double prev = 0.0;
  bool converged = false;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * lambda * lambda * k * k);
    p += sign * term;
    if (term <= 0.001 * prev || term <= 1e-12 * std::abs(p)) {
      converged = true;
      break;
    }
    sign = -sign;
    prev = term;
  }
  // a non-convergent alternating series only happens as lambda -> 0, where
  // the p-value tends to 1
  if (!converged) return 1.0;
  p *= 2.0;
  return std::fmin(std::fmax(p, 0.0), 1.0);
}

MeanSe mean_se(const std::vector<double>& xs) {
  if (xs.empty()) {
    throw ConfigError("mean_se: empty sample");
  }
  const double n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double v : xs) m += v;
  m /= n;
  if (xs.size() == 1) return {m, 0.0};
  double s2 = 0.0;
  for (double v : xs) s2 += (v - m) * (v - m);
  s2 /= (n - 1.0);
  return {m, std::sqrt(s2 / n)};
}

}  // namespace rhobound
