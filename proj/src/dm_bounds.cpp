#include "rhobound/dm_bounds.hpp"

#include <cmath>

#include "rhobound/special_functions.hpp"

namespace rhobound {

namespace {

double drift_threshold(double lambda, double L) {
  return 2.0 * L / (1.0 - lambda);
}

void check_drift_pair(double lambda, double L) {
  if (!std::isfinite(lambda) || !(lambda >= 0.0 && lambda < 1.0)) {
    throw ConfigError("drift factor must lie in [0,1)");
  }
  if (!std::isfinite(L) || !(L >= 0.0)) {
    throw ConfigError("drift offset must be finite and >= 0");
  }
}

// log of the interpolated rate at exponent a; log_gamma may be -inf
double log_rate_at(double log_gamma, double log_b, double log_big, double a) {
  return std::fmax(a * log_gamma, (1.0 - a) * log_b + a * log_big);
}

struct RateTerms {
  double log_gamma;
  double log_b;    // contraction factor on the small set, < 0 when feasible
  double log_big;  // log(1 + 2(lambda*d + L))
};

RateTerms rate_terms(double lambda, double L, double d, double gamma) {
  RateTerms t;
  t.log_gamma = std::log(gamma);
  t.log_b = std::log((1.0 + 2.0 * L + lambda * d) / (1.0 + d));
  t.log_big = std::log1p(2.0 * (lambda * d + L));
  return t;
}

}  // namespace

void validate_conditions(const DmConditions& c) {
  check_drift_pair(c.lambda, c.L);
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) {
    throw ConfigError("minorization mass must lie in [0,1)");
  }
  if (!(c.a > 0.0 && c.a < 1.0)) {
    throw ConfigError("interpolation exponent must lie in (0,1)");
  }
  if (!std::isfinite(c.d) || !(c.d > drift_threshold(c.lambda, c.L))) {
    throw InfeasibleError("small-set level must exceed 2L/(1-lambda)");
  }
}

double rosenthal_rate(const DmConditions& c) {
  validate_conditions(c);
  RateTerms t = rate_terms(c.lambda, c.L, c.d, c.gamma);
  return std::exp(log_rate_at(t.log_gamma, t.log_b, t.log_big, c.a));
}

RateChoice optimize_a(double lambda, double L, double d, double gamma) {
  validate_conditions({lambda, L, d, gamma, 0.5});
  RateTerms t = rate_terms(lambda, L, d, gamma);
  auto value = [&](double a) {
    return log_rate_at(t.log_gamma, t.log_b, t.log_big, a);
  };

  constexpr int kGrid = 512;
  const double llo = std::log(1e-6);
  const double lhi = std::log(1.0 - 1e-6);
  double grid[kGrid];
  int best_i = 0;
  double best = value(std::exp(llo));
  grid[0] = std::exp(llo);
  for (int i = 1; i < kGrid; ++i) {
    grid[i] = std::exp(llo + (lhi - llo) * i / (kGrid - 1.0));
    double v = value(grid[i]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }

  double lo = grid[best_i > 0 ? best_i - 1 : 0];
  double hi = grid[best_i < kGrid - 1 ? best_i + 1 : kGrid - 1];
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = value(x2);
    }
  }
  double refined = 0.5 * (lo + hi);
  double a_star = grid[best_i];
  if (value(refined) < best) {
    best = value(refined);
    a_star = refined;
  }
  double rate = std::exp(best);
  return {rate, a_star, rate >= 1.0};
}

BestRate rosenthal_best_rate(double lambda, double L,
                             const std::vector<double>& d_grid,
                             const std::function<double(double)>& gamma_of_d) {
  check_drift_pair(lambda, L);
  bool found = false;
  BestRate out;
  for (double d : d_grid) {
    if (!std::isfinite(d) || !(d > drift_threshold(lambda, L))) continue;
    double gamma = gamma_of_d(d);
    if (!(gamma >= 0.0 && gamma < 1.0)) {
      throw ConfigError("gamma_of_d must return a mass in [0,1)");
    }
    RateChoice choice = optimize_a(lambda, L, d, gamma);
    if (!found || choice.rate < out.rate) {
      out = {choice.rate, d, choice.a, choice.vacuous};
      found = true;
    }
  }
  if (!found) {
    throw InfeasibleError("no level in the grid satisfies d > 2L/(1-lambda)");
  }
  return out;
}

double chi2_median(int p) {
  if (p < 1) throw ConfigError("chi2_median: need p >= 1");
  return chi2_quantile(0.5, static_cast<double>(p));
}

namespace {

// the mass floor is strictly below one in exact arithmetic; keep it that way
// when the normal tail underflows
double mass_floor(double half_diameter_sq) {
  double g = 1.0 - 2.0 * std_normal_cdf(-std::sqrt(half_diameter_sq / 3.0));
  return std::fmin(g, 1.0 - 0x1p-53);
}

}  // namespace

double ar_gamma_lower(int p) {
  if (p < 1) throw ConfigError("ar_gamma_lower: need p >= 1");
  return mass_floor(chi2_median(p));
}

double ar_gamma_lower(int p, double d) {
  if (p < 1) throw ConfigError("ar_gamma_lower: need p >= 1");
  if (!std::isfinite(d)) throw ConfigError("ar_gamma_lower: level not finite");
  if (p * d < chi2_median(p)) {
    throw InfeasibleError(
        "level set too small to hold half the stationary mass");
  }
  return mass_floor(p * d);
}

double smallset_mass_check(int p, double d_level, double lambda, double L) {
  if (p < 1) throw ConfigError("smallset_mass_check: need p >= 1");
  check_drift_pair(lambda, L);
  if (!std::isfinite(d_level) || !(d_level > drift_threshold(lambda, L))) {
    throw InfeasibleError("level must exceed 2L/(1-lambda)");
  }
  return chi2_cdf(p * d_level, static_cast<double>(p));
}

MultistepBound ar_multistep_bound(int p) {
  if (p < 1) throw ConfigError("ar_multistep_bound: need p >= 1");
  const double pd = static_cast<double>(p);
  const double log4 = std::log(4.0);
  double t = std::exp(-pd / 3.0 * log4);  // 4^{-p/3}
  double d = 1.0 / t;
  double lambda = std::exp(-pd * log4);
  if (!(d > 2.0 / (1.0 - lambda))) {
    throw InfeasibleError("p too small for the p-step level choice");
  }
  double four_p = std::exp(pd * log4);
  double log_mass_a = 0.5 * pd * std::log1p(t);
  double log_mass_b = pd * d * (1.0 + d) / (2.0 * (four_p - 1.0));
  MultistepBound out;
  out.gamma = -std::expm1(-(log_mass_a + log_mass_b));
  double log_second = 0.5 * (std::log(3.0 + t * t) - std::log1p(d)) +
                      0.5 * std::log(3.0 + 2.0 * t * t);
  double log_rho = std::fmax(0.5 * std::log(out.gamma), log_second);
  out.rho_p = std::exp(log_rho);
  out.per_step_rate = std::exp(log_rho / pd);
  out.vacuous = out.rho_p >= 1.0;
  return out;
}

}  // namespace rhobound
