#pragma once

#include <functional>
#include <vector>

#include "rhobound/errors.hpp"

namespace rhobound {

// Drift-and-minorization inputs: E V(next) <= lambda*V + L, minorization mass
// gamma on the level set {V <= d}, and the interpolation exponent a.
struct DmConditions {
  double lambda = 0.0;
  double L = 0.0;
  double d = 0.0;
  double gamma = 0.0;
  double a = 0.5;
};

// Range violations raise ConfigError; d <= 2L/(1-lambda) raises
// InfeasibleError.
void validate_conditions(const DmConditions& c);

// max(gamma^a, ((1+2L+lambda*d)/(1+d))^{1-a} * (1+2(lambda*d+L))^a).  The
// value can exceed one; callers must treat that as a vacuous bound, not an
// error.
double rosenthal_rate(const DmConditions& c);

struct RateChoice {
  double rate = 0.0;
  double a = 0.0;
  bool vacuous = false;
};

// Minimizes rosenthal_rate over the exponent: a 512-point log-spaced scan of
// (0,1) followed by golden-section refinement around the best cell.
RateChoice optimize_a(double lambda, double L, double d, double gamma);

struct BestRate {
  double rate = 0.0;
  double d = 0.0;
  double a = 0.0;
  bool vacuous = false;
};

// Joint minimization over a level grid and the exponent; gamma_of_d supplies
// the minorization mass available at each level.  Levels failing the drift
// condition are skipped; if none survive, throws InfeasibleError.
BestRate rosenthal_best_rate(double lambda, double L,
                             const std::vector<double>& d_grid,
                             const std::function<double(double)>& gamma_of_d);

// Median of the chi-square distribution with p degrees of freedom.
double chi2_median(int p);

// Best minorization mass any admissible small set can achieve for the
// Gaussian autoregression in dimension p (the smallest set holding half the
// stationary mass has diameter 2*sqrt(m_p)), and the same bound for the
// specific level set {|x|^2 <= p*d}, which must hold at least that mass.
// Values are clamped just below one where the normal tail underflows.
double ar_gamma_lower(int p);
double ar_gamma_lower(int p, double d);

// Stationary mass of the level set {V <= d_level} under N(0, I_p) with
// V = |x|^2/p.  Declaring drift constants enforces the feasibility check
// d_level > 2L/(1-lambda) before evaluation.
double smallset_mass_check(int p, double d_level, double lambda = 0.0,
                           double L = 0.0);

struct MultistepBound {
  double gamma = 0.0;
  double rho_p = 0.0;
  double per_step_rate = 0.0;
  bool vacuous = false;  // rho_p >= 1; happens for p in {2,3,4}
};

// p-step autoregression bound built from lambda = 4^{-p}, L = 1, d = 4^{p/3}
// and a = 1/2.  gamma is assembled in log space so scans up to p = 200 keep
// full precision.
MultistepBound ar_multistep_bound(int p);

}  // namespace rhobound
