#include "rhobound/chains.hpp"

#include <cmath>

#include "rhobound/special_functions.hpp"

namespace rhobound {

namespace {

const double kArNoiseScale = std::sqrt(0.75);

double latent_quantile(double u, double mu, int y) {
  return tn_inv_cdf(u, mu, y == 1 ? TruncSide::positive : TruncSide::negative);
}

// dH/dmu at fixed u: s(1-u, mu) on the positive branch, s(u, -mu) on the
// negative one.
double latent_slope(double u, double mu, int y) {
  return y == 1 ? s_fn(1.0 - u, mu) : s_fn(u, -mu);
}

}  // namespace

ArNoise ar_draw_noise(const ArChain& chain, RandomStream& stream) {
  ArNoise nz;
  nz.z.resize(chain.p);
  for (int i = 0; i < chain.p; ++i) nz.z(i) = stream.next_normal();
  return nz;
}

Eigen::VectorXd ar_apply(const ArChain& chain, const Eigen::VectorXd& x,
                         const ArNoise& noise) {
  if (x.size() != chain.p || noise.z.size() != chain.p) {
    throw ConfigError("ar_apply: dimension mismatch");
  }
  return 0.5 * x + kArNoiseScale * noise.z;
}

Eigen::VectorXd ar_map(const ArChain& chain, const Eigen::VectorXd& x,
                       RandomStream& stream) {
  return ar_apply(chain, x, ar_draw_noise(chain, stream));
}

AcChain::AcChain(ProbitData data) : data_(std::move(data)) {
  const auto n_rows = data_.X.rows();
  const auto p_cols = data_.X.cols();
  if (n_rows < 1 || p_cols < 1) {
    throw ConfigError("AcChain: design matrix must be non-empty");
  }
  if (data_.y.size() != n_rows) {
    throw ConfigError("AcChain: response length does not match design rows");
  }
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    if (data_.y(i) != 0 && data_.y(i) != 1) {
      throw ConfigError("AcChain: responses must be 0 or 1");
    }
  }
  if (data_.Q.rows() != p_cols || data_.Q.cols() != p_cols ||
      data_.v.size() != p_cols) {
    throw ConfigError("AcChain: prior dimensions do not match the design");
  }
  flat_prior_ = data_.Q.cwiseAbs().maxCoeff() == 0.0;
  if (!flat_prior_) {
    require_symmetric(data_.Q);
    auto qe = eig_extremes(data_.Q);
    if (!(qe.min > static_cast<double>(p_cols) * 1e-12 * qe.max)) {
      throw ConfigError("AcChain: prior precision must be exactly zero or SPD");
    }
  }
  sigma_ = data_.X.transpose() * data_.X + data_.Q;
  sigma_inv_sqrt_ = inv_sqrt(sigma_);  // rejects singular/indefinite Sigma
  llt_.compute(sigma_);
  if (flat_prior_) {
    prior_shift_ = Eigen::VectorXd::Zero(p_cols);
  } else {
    prior_shift_ = llt_.solve(data_.Q * data_.v);
  }
}

AcNoise ac_draw_noise(const AcChain& chain, RandomStream& stream) {
  AcNoise nz;
  nz.u.resize(chain.n());
  nz.z.resize(chain.p());
  for (int i = 0; i < chain.n(); ++i) nz.u(i) = stream.next_uniform();
  for (int j = 0; j < chain.p(); ++j) nz.z(j) = stream.next_normal();
  return nz;
}

Eigen::VectorXd ac_apply(const AcChain& chain, const Eigen::VectorXd& beta,
                         const AcNoise& noise) {
  if (beta.size() != chain.p()) {
    throw ConfigError("ac_apply: state dimension mismatch");
  }
  const Eigen::MatrixXd& x = chain.data().X;
  Eigen::VectorXd mu = x * beta;
  Eigen::VectorXd latent(chain.n());
  for (int i = 0; i < chain.n(); ++i) {
    latent(i) = latent_quantile(noise.u(i), mu(i), chain.data().y(i));
  }
  return chain.sigma_solve(x.transpose() * latent) + chain.prior_shift() +
         chain.sigma_inv_sqrt() * noise.z;
}

Eigen::VectorXd ac_map(const AcChain& chain, const Eigen::VectorXd& beta,
                       RandomStream& stream) {
  return ac_apply(chain, beta, ac_draw_noise(chain, stream));
}

Eigen::VectorXd ac_gibbs_step(const AcChain& chain, const Eigen::VectorXd& beta,
                              RandomStream& stream) {
  if (beta.size() != chain.p()) {
    throw ConfigError("ac_gibbs_step: state dimension mismatch");
  }
  const ProbitData& d = chain.data();
  Eigen::VectorXd mu = d.X * beta;
  Eigen::VectorXd z(chain.n());
  for (int i = 0; i < chain.n(); ++i) {
    z(i) = latent_quantile(stream.next_uniform(), mu(i), d.y(i));
  }
  Eigen::VectorXd mean = chain.sigma_solve(d.X.transpose() * z + d.Q * d.v);
  Eigen::VectorXd g(chain.p());
  for (int j = 0; j < chain.p(); ++j) g(j) = stream.next_normal();
  return mean + chain.sigma_inv_sqrt() * g;
}

Eigen::VectorXd ac_path_derivative(const AcChain& chain, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& alpha, double t,
                                   const AcNoise& noise) {
  if (beta.size() != chain.p() || alpha.size() != chain.p()) {
    throw ConfigError("ac_path_derivative: dimension mismatch");
  }
  const Eigen::MatrixXd& x = chain.data().X;
  Eigen::VectorXd mu = x * (beta + t * alpha);
  Eigen::VectorXd xa = x * alpha;
  Eigen::VectorXd weighted(chain.n());
  for (int i = 0; i < chain.n(); ++i) {
    weighted(i) = latent_slope(noise.u(i), mu(i), chain.data().y(i)) * xa(i);
  }
  return chain.sigma_solve(x.transpose() * weighted);
}

Eigen::VectorXd ac_path_derivative(const AcChain& chain, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& alpha, double t,
                                   RandomStream& stream) {
  return ac_path_derivative(chain, beta, alpha, t, ac_draw_noise(chain, stream));
}

ReChain::ReChain(REData data) : data_(std::move(data)) {
  if (data_.p < 2 || data_.r < 1) {
    throw ConfigError("ReChain: need p >= 2 groups and r >= 1 replicates");
  }
  if (data_.group_means.size() != data_.p) {
    throw ConfigError("ReChain: group-mean vector length must equal p");
  }
  if (!(data_.ssw >= 0.0)) {
    throw ConfigError("ReChain: within-group sum of squares must be >= 0");
  }
  if (!(data_.a1 > 0.0 && data_.b1 > 0.0 && data_.a2 > 0.0 && data_.b2 > 0.0)) {
    throw ConfigError("ReChain: hyperparameters must be positive");
  }
  double mean_of_means = data_.group_means.mean();
  double scale = std::fmax(1.0, data_.group_means.cwiseAbs().maxCoeff());
  if (std::abs(mean_of_means - data_.grand_mean) > 1e-10 * scale) {
    throw ConfigError("ReChain: grand mean must equal the mean of group means");
  }
}

ReNoise re_draw_noise(const ReChain& chain, RandomStream& stream) {
  const REData& d = chain.data();
  ReNoise nz;
  nz.j1 = stream.next_gamma(0.5 * d.p + d.a1);
  nz.j2 = stream.next_gamma(0.5 * d.p * d.r + d.a2);
  nz.z.resize(d.p + 1);
  for (int i = 0; i <= d.p; ++i) nz.z(i) = stream.next_normal();
  return nz;
}

ReStep re_apply_full(const ReChain& chain, const Eigen::VectorXd& eta,
                     const ReNoise& noise) {
  const REData& d = chain.data();
  if (eta.size() != d.p + 1) {
    throw ConfigError("re_apply: state dimension mismatch");
  }
  const double sqrt_p = std::sqrt(static_cast<double>(d.p));
  double sum_eta_sq = eta.tail(d.p).squaredNorm();
  double lambda_theta = noise.j1 / (d.b1 + 0.5 * sum_eta_sq);

  // full residual sum of squares, reconstructed from sufficient statistics
  double between = 0.0;
  for (int i = 0; i < d.p; ++i) {
    double dev = eta(i + 1) + eta(0) / sqrt_p - d.group_means(i);
    between += dev * dev;
  }
  double ss = d.ssw + static_cast<double>(d.r) * between;
  double lambda_e = noise.j2 / (d.b2 + 0.5 * ss);

  double prec = lambda_theta + d.r * lambda_e;
  ReStep out;
  out.lambda_theta = lambda_theta;
  out.lambda_e = lambda_e;
  out.eta.resize(d.p + 1);
  out.eta(0) = sqrt_p * d.grand_mean +
               noise.z(0) * std::sqrt(prec / (d.r * lambda_e * lambda_theta));
  double root_prec = std::sqrt(prec);
  for (int i = 0; i < d.p; ++i) {
    out.eta(i + 1) = d.r * lambda_e * (d.group_means(i) - out.eta(0) / sqrt_p) / prec +
                     noise.z(i + 1) / root_prec;
  }
  return out;
}

Eigen::VectorXd re_apply(const ReChain& chain, const Eigen::VectorXd& eta,
                         const ReNoise& noise) {
  return re_apply_full(chain, eta, noise).eta;
}

Eigen::VectorXd re_map(const ReChain& chain, const Eigen::VectorXd& eta,
                       RandomStream& stream) {
  return re_apply(chain, eta, re_draw_noise(chain, stream));
}

Eigen::VectorXd re_gibbs_step(const ReChain& chain, const Eigen::VectorXd& eta,
                              RandomStream& stream) {
  const REData& d = chain.data();
  if (eta.size() != d.p + 1) {
    throw ConfigError("re_gibbs_step: state dimension mismatch");
  }
  const double sqrt_p = std::sqrt(static_cast<double>(d.p));
  double lambda_theta =
      stream.next_gamma(0.5 * d.p + d.a1) / (d.b1 + 0.5 * eta.tail(d.p).squaredNorm());
  double between = 0.0;
  for (int i = 0; i < d.p; ++i) {
    double dev = eta(i + 1) + eta(0) / sqrt_p - d.group_means(i);
    between += dev * dev;
  }
  double lambda_e = stream.next_gamma(0.5 * d.p * d.r + d.a2) /
                    (d.b2 + 0.5 * (d.ssw + d.r * between));
  double prec = lambda_theta + d.r * lambda_e;
  Eigen::VectorXd next(d.p + 1);
  next(0) = sqrt_p * d.grand_mean +
            stream.next_normal() * std::sqrt(prec / (d.r * lambda_e * lambda_theta));
  for (int i = 0; i < d.p; ++i) {
    next(i + 1) = d.r * lambda_e * (d.group_means(i) - next(0) / sqrt_p) / prec +
                  stream.next_normal() / std::sqrt(prec);
  }
  return next;
}

DistanceCurve curve_from_paths(const Eigen::MatrixXd& dist) {
  const Eigen::Index reps = dist.rows();
  const Eigen::Index cols = dist.cols();
  if (reps < 1 || cols < 1) {
    throw ConfigError("curve_from_paths: empty distance matrix");
  }
  DistanceCurve out;
  out.mean.resize(static_cast<std::size_t>(cols));
  out.se.resize(static_cast<std::size_t>(cols));
  const double n = static_cast<double>(reps);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < reps; ++r) sum += dist(r, j);
    double m = sum / n;
    out.mean[static_cast<std::size_t>(j)] = m;
    if (reps > 1) {
      double ss = 0.0;
      for (Eigen::Index r = 0; r < reps; ++r) {
        double dev = dist(r, j) - m;
        ss += dev * dev;
      }
      out.se[static_cast<std::size_t>(j)] = std::sqrt(ss / (n - 1.0) / n);
    } else {
      out.se[static_cast<std::size_t>(j)] = 0.0;
    }
  }
  return out;
}

}  // namespace rhobound
