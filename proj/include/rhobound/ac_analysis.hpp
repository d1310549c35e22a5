#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>

#include "rhobound/chains.hpp"
#include "rhobound/stats.hpp"
#include "rhobound/w_bounds.hpp"

namespace rhobound {

// Whitened view of a probit instance: W = X Sigma^{-1/2} and the row norms
// every spectral statistic needs.  References the chain; keep it alive.
class SpectralContext {
 public:
  explicit SpectralContext(const AcChain& chain);

  const AcChain& chain() const { return *chain_; }
  const Eigen::MatrixXd& whitened() const { return whitened_; }
  const Eigen::VectorXd& row_sq_norms() const { return row_sq_norms_; }
  Eigen::Index n() const { return whitened_.rows(); }
  Eigen::Index p() const { return whitened_.cols(); }

 private:
  const AcChain* chain_;
  Eigen::MatrixXd whitened_;
  Eigen::VectorXd row_sq_norms_;
};

// diag of the latent-quantile Jacobian at (beta, u); every entry in (0,1)
Eigen::VectorXd s_diag(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                       const Eigen::VectorXd& u);

// lambda_max(W^T diag(s) W) for one uniform draw; strictly below one
double spectral_stat(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& u);

// Monte Carlo E lambda_max over iid uniform vectors. The seed fixes the
// draws, so different beta share common random numbers.
MeanSe mc_expected_spectral(const SpectralContext& ctx,
                            const Eigen::VectorXd& beta, int reps,
                            std::uint64_t seed);

// Truncated-normal variance weights: entry i is xi(x_i'beta) for y_i = 1 and
// xi(-x_i'beta) for y_i = 0.  Doubles as E s_diag (the integral of the
// quantile slope over u equals the variance) and as one minus the Hessian
// weights of the log-likelihood.
Eigen::VectorXd lambda_diag(const SpectralContext& ctx,
                            const Eigen::VectorXd& beta);

// lambda_max(W^T diag(lambda_diag) W): the deterministic spectral curve
double gamma_hat(const SpectralContext& ctx, const Eigen::VectorXd& beta);

// sqrt(lambda_max(sum_i ||w_i||^2 w_i w_i^T)): concentration half-width
double hoeffding_sigma(const SpectralContext& ctx);

// lambda_max(W^T W) < 1; certified rate under a strictly positive-definite
// prior precision.  Flat prior -> ConfigError.
double shrinkage_bound(const SpectralContext& ctx);

// sqrt(v' Sigma v) in this instance's metric
double state_norm(const SpectralContext& ctx, const Eigen::VectorXd& v);

struct SearchConfig {
  int directions = 32;      // random search directions
  int ladder = 9;           // magnitudes per direction, log-spaced
  int refine = 48;          // local hill-climb proposals from the best point
  std::uint64_t seed = 1;
  double ladder_max = 1e6;  // largest magnitude tried
};

struct SupEstimate {
  double value = 0.0;
  Eigen::VectorXd arg;
  Provenance provenance = Provenance::heuristic_sup;
};

// Best-found sup_beta gamma_hat(beta) + sigma sqrt(2 log p); heuristic, not
// certified.  Larger budgets only grow the candidate set.
SupEstimate rho_hat_2(const SpectralContext& ctx, const SearchConfig& cfg);

// Best-found drift factor sup over directions and displacement magnitudes of
// ||W^T diag(lambda_diag) W eta||^2 along beta = mode + m S^{-1/2} eta
SupEstimate drift_lambda_estimate(const SpectralContext& ctx,
                                  const Eigen::VectorXd& mode,
                                  const SearchConfig& cfg);

// Carries the last iterate of a failed mode search.
struct ModeError : NumericError {
  ModeError(const std::string& what, Eigen::VectorXd last_)
      : NumericError(what), last(std::move(last_)) {}
  Eigen::VectorXd last;
};

// Damped Newton on the strictly concave log-posterior; stops when the
// gradient's Sigma-norm drops below tol.
Eigen::VectorXd posterior_mode(const SpectralContext& ctx, double tol = 1e-10,
                               int max_iter = 100);

// Best-found sup of mc_expected_spectral over the ball
// {beta: ||beta - mode||_Sigma^2 <= d}; boundary-heavy sampling with one
// shared uniform stream across candidates.
SupEstimate ball_gamma_estimate(const SpectralContext& ctx,
                                const Eigen::VectorXd& mode, double d,
                                int reps, const SearchConfig& cfg);

// Monte Carlo E||beta - f(beta)||_Sigma: the one-step transport cost used by
// the single-rate bound.
MeanSe mc_one_step_cost(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                        int reps, std::uint64_t seed);

struct AcCertificate {
  double lambda_drift = 0.0;
  double gamma_ball = 0.0;
  double d = 0.0;
  double a = 0.0;
  double rho0 = 0.0;
  Eigen::VectorXd mode;
  std::map<std::string, Provenance> provenance;
};

struct AcAnalysisConfig {
  double d = 0.0;  // <= 0 selects twice the feasibility threshold 4/(1-lambda)
  int mc_reps = 512;
  SearchConfig search;
};

struct AcReport {
  AcCertificate cert;
  GeomBound w_bound;
  GeomBound tv_bound;
};

// Full assembly: mode, drift factor, ball contraction, rate optimization,
// and the Wasserstein + total-variation bound records.
AcReport ac_certificate(const SpectralContext& ctx, const AcAnalysisConfig& cfg);

// Plug-in large-sample rate ceiling 1 - lambda_min[A^{-1/2} B A^{-1/2}]/2
// with A the averaged second moment of the covariate rows and B the same
// average damped by min(Phi, 1-Phi) at the true signal.
double largen_rho_limit(const Eigen::MatrixXd& rows,
                        const Eigen::VectorXd& beta_star);

}  // namespace rhobound
