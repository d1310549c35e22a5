#pragma once

namespace rhobound {

// Which half-line a unit-variance normal is truncated to.
enum class TruncSide { negative = 0, positive = 1 };

double std_normal_pdf(double x);
double log_std_normal_pdf(double x);

// 0.5 * erfc(-x/sqrt(2)); relatively accurate in the lower tail down to the
// underflow threshold (x ~ -37.5), saturating at 0/1 beyond.
double std_normal_cdf(double x);

// log Phi(x), usable far past the point where Phi underflows.
double log_std_normal_cdf(double x);

// phi(x)/Phi(x); stable for arbitrarily negative x (continued fraction).
double std_normal_hazard(double x);

// Upper Mills ratio Phi(-z)/phi(z) for z >= 0.
double mills_ratio(double z);

// Inverse CDF. Rational initial guess polished by Halley/Newton steps;
// round-trips through std_normal_cdf to ~1e-15 relative, including deep
// tails (handled in log space). Throws std::invalid_argument outside (0,1).
double std_normal_quantile(double u);

// Phi^{-1}(exp(log_u)) without forming exp(log_u); log_u <= 0.
double std_normal_quantile_logp(double log_u);

// Inverse CDF of N(mu,1) truncated to (0,inf) (side=positive) or (-inf,0)
// (side=negative). The output is polished in log space directly on the
// offset from mu, so it stays strictly inside the support even when the
// untruncated mass there is ~1e-200 (|mu| up to ~30).
double tn_inv_cdf(double u, double mu, TruncSide side);

// d/dmu of tn_inv_cdf at fixed u for the positive side evaluated at (u, mu):
// 1 - u*phi(mu)/phi(Phi^{-1}(Phi(mu)*u)), computed in log space.
// Value clamped into [DBL_MIN, 1-2^-53]; the true value lies in (0,1) but
// rounds to 1.0 in doubles once |mu| is large.
double s_fn(double u, double mu);

// Integral of s_fn(., mu) over (0,1); closed form
// 1 - phi(mu)*(mu*Phi(mu)+phi(mu))/Phi(mu)^2, which also equals the variance
// of the positively truncated normal. Clamped like s_fn.
double xi_fn(double mu);

// Variance of TN(mu,1;side). Equals xi_fn(mu) for side=positive.
double tn_variance(double mu, TruncSide side);

// L1 distance between N(m1, S) and N(m2, S) as a function of the
// Mahalanobis separation delta = ||S^{-1/2}(m1-m2)||: 2 - 4*Phi(-delta/2).
double same_cov_gaussian_tv(double delta);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

double chi2_cdf(double x, double dof);
double chi2_quantile(double u, double dof);

}  // namespace rhobound
