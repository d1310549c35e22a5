#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "rhobound/chains.hpp"

namespace rhobound {

enum class Regime {
  fixed_p_growing_n,  // iid covariate rows, n scanned upward
  shrinkage,          // iid rows plus a strong Gaussian prior precision
  repeated_measures,  // q distinct rows, each replicated
  random_effects      // one-way layout with group and error precisions
};

enum class InverseLink { probit, logistic };

// G(mu) in (0,1) for every finite mu.
double inverse_link(InverseLink link, double mu);

// min(G, 1-G): the response-uncertainty margin at signal mu.
double link_margin(InverseLink link, double mu);

// Everything a generator needs, in one record.  Which fields matter depends
// on the regime; validation happens in the generator that consumes them.
struct GenSpec {
  Regime regime = Regime::fixed_p_growing_n;
  int n = 0;
  int p = 0;
  int q = 0;
  int r = 0;
  Eigen::VectorXd beta_star;  // empty: use sparse_beta(p, k)
  double mu_star = 0.0;
  double lam_theta_star = 1.0;
  double lam_e_star = 1.0;
  InverseLink link = InverseLink::probit;
  int k = 0;  // leading nonzero count when beta_star is left empty
  std::uint64_t seed = 0;
};

// (value, ..., value, 0, ..., 0) with k leading entries.
Eigen::VectorXd sparse_beta(int p, int k, double value = 1.0);

// Resolves the coefficient vector a spec implies: the explicit one if set
// (size-checked), otherwise the sparse default.
Eigen::VectorXd resolved_beta(const GenSpec& spec);

// iid standard-normal covariate rows with Bernoulli(G(x'beta*)) responses and
// a flat prior.  Row i consumes its own replicate stream, so generating
// n' < n rows with the same seed yields an exact prefix.
ProbitData gen_probit_sequence(const GenSpec& spec, int n);

// q-by-p matrix of iid standard normals; row j has its own replicate stream.
Eigen::MatrixXd sample_design(int q, int p, std::uint64_t seed);

// Stacks row i of xtilde reps[i] times (groups contiguous, in order) and
// draws an independent response for every copy.  Flat prior.
ProbitData gen_repeated_design(const Eigen::MatrixXd& xtilde,
                               const std::vector<int>& reps,
                               const Eigen::VectorXd& beta_star,
                               InverseLink link, std::uint64_t seed);

// One-way layout y_ij = mu + theta_i + e_ij with theta_i ~ N(0, 1/lam_theta)
// and e_ij ~ N(0, 1/lam_e); returns the sufficient statistics computed from
// the simulated responses.  Infinite precisions are allowed and zero out the
// corresponding term.  Gamma-prior fields default to 1; adjust afterwards.
REData gen_re_data(int p, int r, double mu_star, double lam_theta_star,
                   double lam_e_star, std::uint64_t seed);

// Conditions the convergence analysis rests on.  b1..b4 concern the law of
// an iid covariate row, c1/c2 the prior precision, d1..d4 a replicated
// design, e1/e2 the one-way layout.
enum class Assumption { b1, b2, b3, b4, c1, c2, d1, d2, d3, d4, e1, e2 };

enum class CheckFlag {
  pass,          // finite-instance condition verified on this input
  fail,          // finite-instance condition violated on this input
  indeterminate  // limit statement; only the finite ratio is reportable
};

struct AssumptionReport {
  Assumption which = Assumption::b1;
  double statistic = 0.0;
  double se = 0.0;  // Monte Carlo half-width scale; 0 when exact
  CheckFlag flag = CheckFlag::indeterminate;
  std::string note;
};

std::string assumption_name(Assumption which);
std::string flag_name(CheckFlag flag);

// Empirical checks on a concrete instance.  beta_star is required for b4/d4
// (the signal enters the statistic); mc_budget only matters where sampling
// is involved.  e1/e2 are inapplicable here and throw ConfigError.
AssumptionReport check_assumption(
    const ProbitData& data, Assumption which, int mc_budget = 0,
    const Eigen::VectorXd& beta_star = Eigen::VectorXd(),
    InverseLink link = InverseLink::probit);

// Checks under the generating law itself: moments of N(0, I_p) are exact
// where known, Monte Carlo with mc_budget draws elsewhere.  Prior- and
// design-dependent conditions are inapplicable and throw ConfigError, except
// d3/e1 which read the spec's dimensions.
AssumptionReport check_assumption(const GenSpec& spec, Assumption which,
                                  int mc_budget);

// Sample-moment checks for the one-way layout (e1/e2 only).
AssumptionReport check_assumption(const REData& data, Assumption which);

std::vector<AssumptionReport> check_assumptions(
    const ProbitData& data, const std::vector<Assumption>& which,
    int mc_budget = 0, const Eigen::VectorXd& beta_star = Eigen::VectorXd(),
    InverseLink link = InverseLink::probit);

}  // namespace rhobound
