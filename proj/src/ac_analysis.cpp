#include "rhobound/ac_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rhobound/random_stream.hpp"
#include "rhobound/special_functions.hpp"
#include "rhobound/sym_matrix.hpp"

namespace rhobound {

namespace {

void check_beta(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                const char* who) {
  if (beta.size() != ctx.p())
    throw ConfigError(std::string(who) + ": coefficient dimension mismatch");
  if (!beta.allFinite())
    throw ConfigError(std::string(who) + ": coefficient must be finite");
}

double top_eigenvalue(const Eigen::MatrixXd& m) { return eig_extremes(m).max; }

Eigen::VectorXd random_unit(RandomStream& st, Eigen::Index p) {
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = st.next_normal();
  const double nrm = v.norm();
  return v / nrm;
}

std::vector<double> log_ladder(int k, double lo, double hi) {
  std::vector<double> out(k);
  if (k == 1) {
    out[0] = hi;
    return out;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < k; ++i)
    out[i] = std::exp(llo + (lhi - llo) * i / (k - 1));
  return out;
}

void check_search(const SearchConfig& cfg) {
  if (cfg.directions < 1 || cfg.ladder < 1 || cfg.refine < 0 ||
      !(cfg.ladder_max > 0.0))
    throw ConfigError("search budget must be positive");
}

// W^T diag(w) W, the p x p conjugated weighted Gram matrix
Eigen::MatrixXd weighted_gram(const SpectralContext& ctx,
                              const Eigen::VectorXd& w) {
  return ctx.whitened().transpose() * w.asDiagonal() * ctx.whitened();
}

}  // namespace

SpectralContext::SpectralContext(const AcChain& chain) : chain_(&chain) {
  whitened_ = chain.data().X * chain.sigma_inv_sqrt();
  row_sq_norms_ = whitened_.rowwise().squaredNorm();
}

Eigen::VectorXd s_diag(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                       const Eigen::VectorXd& u) {
  check_beta(ctx, beta, "s_diag");
  if (u.size() != ctx.n()) throw ConfigError("s_diag: uniform dimension mismatch");
  const Eigen::VectorXd mu = ctx.chain().data().X * beta;
  Eigen::VectorXd out(ctx.n());
  for (Eigen::Index i = 0; i < ctx.n(); ++i) {
    if (!(u(i) > 0.0) || !(u(i) < 1.0))
      throw ConfigError("s_diag: uniforms must lie strictly inside (0,1)");
    out(i) = ctx.chain().data().y(i) == 1 ? s_fn(1.0 - u(i), mu(i))
                                          : s_fn(u(i), -mu(i));
  }
  return out;
}

double spectral_stat(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& u) {
  return top_eigenvalue(weighted_gram(ctx, s_diag(ctx, beta, u)));
}

MeanSe mc_expected_spectral(const SpectralContext& ctx,
                            const Eigen::VectorXd& beta, int reps,
                            std::uint64_t seed) {
  check_beta(ctx, beta, "mc_expected_spectral");
  if (reps < 2) throw ConfigError("mc_expected_spectral: need reps >= 2");
  std::vector<double> vals(static_cast<std::size_t>(reps));
  Eigen::VectorXd u(ctx.n());
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream st(seed, static_cast<std::uint64_t>(rep));
    for (Eigen::Index i = 0; i < ctx.n(); ++i) u(i) = st.next_uniform();
    vals[static_cast<std::size_t>(rep)] = spectral_stat(ctx, beta, u);
  }
  return mean_se(vals);
}

Eigen::VectorXd lambda_diag(const SpectralContext& ctx,
                            const Eigen::VectorXd& beta) {
  check_beta(ctx, beta, "lambda_diag");
  const Eigen::VectorXd mu = ctx.chain().data().X * beta;
  Eigen::VectorXd out(ctx.n());
  for (Eigen::Index i = 0; i < ctx.n(); ++i) {
    out(i) = tn_variance(mu(i), ctx.chain().data().y(i) == 1
                                    ? TruncSide::positive
                                    : TruncSide::negative);
  }
  return out;
}

double gamma_hat(const SpectralContext& ctx, const Eigen::VectorXd& beta) {
  return top_eigenvalue(weighted_gram(ctx, lambda_diag(ctx, beta)));
}

double hoeffding_sigma(const SpectralContext& ctx) {
  return std::sqrt(top_eigenvalue(weighted_gram(ctx, ctx.row_sq_norms())));
}

double shrinkage_bound(const SpectralContext& ctx) {
  if (ctx.chain().flat_prior())
    throw ConfigError(
        "shrinkage bound needs a positive-definite prior precision");
  return top_eigenvalue(ctx.whitened().transpose() * ctx.whitened());
}

double state_norm(const SpectralContext& ctx, const Eigen::VectorXd& v) {
  return sigma_norm(v, ctx.chain().sigma());
}

SupEstimate rho_hat_2(const SpectralContext& ctx, const SearchConfig& cfg) {
  check_search(cfg);
  const double sig_term =
      ctx.p() > 1
          ? hoeffding_sigma(ctx) * std::sqrt(2.0 * std::log(double(ctx.p())))
          : 0.0;

  Eigen::VectorXd best_arg = Eigen::VectorXd::Zero(ctx.p());
  double best = gamma_hat(ctx, best_arg);
  const std::vector<double> ladder =
      log_ladder(cfg.ladder, 1e-2, cfg.ladder_max);
  for (int j = 0; j < cfg.directions; ++j) {
    RandomStream st(cfg.seed, static_cast<std::uint64_t>(j) + 1);
    const Eigen::VectorXd dir = random_unit(st, ctx.p());
    for (double m : ladder) {
      const Eigen::VectorXd cand = m * dir;
      const double val = gamma_hat(ctx, cand);
      if (val > best) {
        best = val;
        best_arg = cand;
      }
    }
  }
  RandomStream rst(cfg.seed, 0);
  for (int it = 0; it < cfg.refine; ++it) {
    Eigen::VectorXd cand(ctx.p());
    const double scale = 0.25 * (1.0 + best_arg.norm());
    for (Eigen::Index i = 0; i < ctx.p(); ++i)
      cand(i) = best_arg(i) + scale * rst.next_normal();
    const double val = gamma_hat(ctx, cand);
    if (val > best) {
      best = val;
      best_arg = cand;
    }
  }
  return {best + sig_term, best_arg, Provenance::heuristic_sup};
}

SupEstimate drift_lambda_estimate(const SpectralContext& ctx,
                                  const Eigen::VectorXd& mode,
                                  const SearchConfig& cfg) {
  check_search(cfg);
  check_beta(ctx, mode, "drift_lambda_estimate");

  // ratio at displacement m along the unit-psi direction S^{-1/2} eta:
  // ||W^T Lambda(mode + m S^{-1/2} eta) W eta||^2
  const auto ratio = [&](double m, const Eigen::VectorXd& eta) {
    const Eigen::VectorXd beta =
        mode + m * (ctx.chain().sigma_inv_sqrt() * eta);
    return (weighted_gram(ctx, lambda_diag(ctx, beta)) * eta).squaredNorm();
  };

  double best = 0.0;
  double best_m = 0.0;
  Eigen::VectorXd best_eta = Eigen::VectorXd::Unit(ctx.p(), 0);
  std::vector<double> ladder = log_ladder(cfg.ladder, 1e-2, cfg.ladder_max);
  ladder.insert(ladder.begin(), 0.0);
  for (int j = 0; j < cfg.directions; ++j) {
    RandomStream st(cfg.seed, static_cast<std::uint64_t>(j) + 1);
    const Eigen::VectorXd eta = random_unit(st, ctx.p());
    for (double m : ladder) {
      const double val = ratio(m, eta);
      if (val > best) {
        best = val;
        best_m = m;
        best_eta = eta;
      }
    }
  }
  RandomStream rst(cfg.seed, 0);
  for (int it = 0; it < cfg.refine; ++it) {
    Eigen::VectorXd eta(ctx.p());
    for (Eigen::Index i = 0; i < ctx.p(); ++i)
      eta(i) = best_eta(i) + 0.3 * rst.next_normal();
    eta /= eta.norm();
    const double m = best_m == 0.0 ? 0.01 * std::exp(rst.next_normal())
                                   : best_m * std::exp(0.3 * rst.next_normal());
    const double val = ratio(m, eta);
    if (val > best) {
      best = val;
      best_m = m;
      best_eta = eta;
    }
  }
  return {best, mode + best_m * (ctx.chain().sigma_inv_sqrt() * best_eta),
          Provenance::heuristic_sup};
}

Eigen::VectorXd posterior_mode(const SpectralContext& ctx, double tol,
                               int max_iter) {
  if (!(tol > 0.0) || max_iter < 1)
    throw ConfigError("posterior_mode: need tol > 0 and max_iter >= 1");
  const ProbitData& data = ctx.chain().data();
  const bool flat = ctx.chain().flat_prior();

  const auto log_post = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd mu = data.X * beta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ctx.n(); ++i)
      acc += data.y(i) == 1 ? log_std_normal_cdf(mu(i))
                            : log_std_normal_cdf(-mu(i));
    if (!flat) {
      const Eigen::VectorXd centered = beta - data.v;
      acc -= 0.5 * centered.dot(data.Q * centered);
    }
    return acc;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(ctx.p());
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd mu = data.X * beta;
    Eigen::VectorXd score(ctx.n());
    for (Eigen::Index i = 0; i < ctx.n(); ++i)
      score(i) = data.y(i) == 1 ? std_normal_hazard(mu(i))
                                : -std_normal_hazard(-mu(i));
    Eigen::VectorXd grad = data.X.transpose() * score;
    if (!flat) grad -= data.Q * (beta - data.v);
    if (state_norm(ctx, grad) <= tol) return beta;

    const Eigen::VectorXd curve =
        Eigen::VectorXd::Ones(ctx.n()) - lambda_diag(ctx, beta);
    Eigen::MatrixXd hess = data.X.transpose() * curve.asDiagonal() * data.X;
    if (!flat) hess += data.Q;
    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success)
      throw ModeError("posterior_mode: curvature matrix not positive-definite",
                      beta);
    const Eigen::VectorXd delta = llt.solve(grad);

    // Backtrack only on losses beyond rounding noise; near the optimum the
    // objective is flat to machine precision and the full step must stand.
    const double base = log_post(beta);
    const double slack = 1e-12 * (1.0 + std::abs(base));
    double step = 1.0;
    while (step > 1e-12 && !(log_post(beta + step * delta) >= base - slack))
      step *= 0.5;
    beta += step * delta;
  }
  throw ModeError("posterior_mode: no convergence within iteration budget",
                  beta);
}

SupEstimate ball_gamma_estimate(const SpectralContext& ctx,
                                const Eigen::VectorXd& mode, double d,
                                int reps, const SearchConfig& cfg) {
  check_search(cfg);
  check_beta(ctx, mode, "ball_gamma_estimate");
  if (!(d >= 0.0)) throw InfeasibleError("ball_gamma_estimate: need d >= 0");

  // one uniform stream shared by every candidate (common random numbers)
  const std::uint64_t mc_seed = cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL;
  double best = mc_expected_spectral(ctx, mode, reps, mc_seed).mean;
  Eigen::VectorXd best_arg = mode;
  const double radius = std::sqrt(d);
  for (int j = 0; j < cfg.directions; ++j) {
    RandomStream st(cfg.seed, static_cast<std::uint64_t>(j) + 1);
    const Eigen::VectorXd eta = random_unit(st, ctx.p());
    double r = radius;
    if (j % 5 == 4) {  // a minority of interior points
      r *= std::pow(st.next_uniform(), 1.0 / static_cast<double>(ctx.p()));
    }
    const Eigen::VectorXd cand =
        mode + r * (ctx.chain().sigma_inv_sqrt() * eta);
    const double val = mc_expected_spectral(ctx, cand, reps, mc_seed).mean;
    if (val > best) {
      best = val;
      best_arg = cand;
    }
  }
  return {best, best_arg, Provenance::heuristic_sup};
}

MeanSe mc_one_step_cost(const SpectralContext& ctx, const Eigen::VectorXd& beta,
                        int reps, std::uint64_t seed) {
  check_beta(ctx, beta, "mc_one_step_cost");
  if (reps < 2) throw ConfigError("mc_one_step_cost: need reps >= 2");
  std::vector<double> vals(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream st(seed, static_cast<std::uint64_t>(rep));
    const AcNoise noise = ac_draw_noise(ctx.chain(), st);
    vals[static_cast<std::size_t>(rep)] =
        state_norm(ctx, beta - ac_apply(ctx.chain(), beta, noise));
  }
  return mean_se(vals);
}

AcReport ac_certificate(const SpectralContext& ctx,
                        const AcAnalysisConfig& cfg) {
  const Eigen::VectorXd mode = posterior_mode(ctx);
  const SupEstimate lam = drift_lambda_estimate(ctx, mode, cfg.search);

  const double threshold = 4.0 / (1.0 - lam.value);
  const double d = cfg.d > 0.0 ? cfg.d : 2.0 * threshold;
  if (!(d > threshold))
    throw InfeasibleError("ac_certificate: level d must exceed 4/(1-lambda)");

  const SupEstimate gam =
      ball_gamma_estimate(ctx, mode, d, cfg.mc_reps, cfg.search);
  if (!(gam.value < 1.0))
    throw InfeasibleError("ac_certificate: ball contraction estimate >= 1");

  ContractionCertificate cert;
  cert.gamma = gam.value;
  cert.gamma0 = 1.0;
  cert.lambda = lam.value;
  cert.L = 2.0;
  cert.d = d;
  cert.c = 2.0 * static_cast<double>(ctx.p());

  const RateSelection sel = select_rate(cert);
  const AdmissibleInterval iv = admissible_a_interval(cert);

  AcReport out;
  out.cert.lambda_drift = lam.value;
  out.cert.gamma_ball = gam.value;
  out.cert.d = d;
  out.cert.a = sel.a;
  out.cert.rho0 = sel.rho;
  out.cert.mode = mode;
  out.cert.provenance = {{"lambda", Provenance::heuristic_sup},
                         {"gamma", Provenance::heuristic_sup},
                         {"d", Provenance::analytic},
                         {"L", Provenance::analytic},
                         {"c", Provenance::analytic},
                         {"gamma0", Provenance::analytic}};

  GeomBound w;
  w.rate = sel.rho;
  w.prefactor_params = {{"c", cert.c},
                        {"lambda", cert.lambda},
                        {"L", cert.L},
                        {"a", sel.a},
                        {"rho_a", sel.rho}};
  w.distance = BoundDistance::w_psi;
  w.provenance = Provenance::heuristic_sup;
  w.a = sel.a;
  w.interval_lo = iv.lo;
  w.interval_hi = iv.hi;
  w.geometric = w.rate < 1.0;

  GeomBound tv = w;
  tv.distance = BoundDistance::tv;
  tv.prefactor_params.emplace_back("c_lip", 2.0 / std::sqrt(2.0 * M_PI));

  out.w_bound = std::move(w);
  out.tv_bound = std::move(tv);
  return out;
}

double largen_rho_limit(const Eigen::MatrixXd& rows,
                        const Eigen::VectorXd& beta_star) {
  if (rows.rows() < 1 || rows.cols() < 1)
    throw ConfigError("largen_rho_limit: empty covariate sample");
  if (beta_star.size() != rows.cols())
    throw ConfigError("largen_rho_limit: signal dimension mismatch");
  const double m = static_cast<double>(rows.rows());
  const Eigen::MatrixXd second = rows.transpose() * rows / m;
  Eigen::VectorXd damp = rows * beta_star;
  for (Eigen::Index i = 0; i < damp.size(); ++i)
    damp(i) = std_normal_cdf(-std::abs(damp(i)));
  const Eigen::MatrixXd damped =
      rows.transpose() * damp.asDiagonal() * rows / m;
  const Eigen::MatrixXd white = inv_sqrt(second);
  return 1.0 - 0.5 * eig_extremes(white * damped * white).min;
}

}  // namespace rhobound
