#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rhobound/errors.hpp"
#include "rhobound/random_stream.hpp"
#include "rhobound/sym_matrix.hpp"

namespace rhobound {

// Every chain is exposed two ways: as a one-step sampler (stream in, state
// out) and as a deterministic mapping applied to an explicit noise record.
// Coupled simulation draws the noise once per step and applies it to both
// states, which is what the contraction arguments are about.

// ---------- Gaussian autoregression x -> x/2 + sqrt(3/4) N(0, I) ----------

struct ArChain {
  int p;
  explicit ArChain(int p_) : p(p_) {
    if (p < 1) throw ConfigError("ArChain: dimension must be >= 1");
  }
};

struct ArNoise {
  Eigen::VectorXd z;
};

ArNoise ar_draw_noise(const ArChain& chain, RandomStream& stream);
Eigen::VectorXd ar_apply(const ArChain& chain, const Eigen::VectorXd& x,
                         const ArNoise& noise);
Eigen::VectorXd ar_map(const ArChain& chain, const Eigen::VectorXd& x,
                       RandomStream& stream);

// ---------- Albert-Chib probit data augmentation ----------

struct ProbitData {
  Eigen::MatrixXd X;  // n x p design
  Eigen::VectorXi y;  // 0/1 responses
  Eigen::MatrixXd Q;  // prior precision, exactly zero or SPD
  Eigen::VectorXd v;  // prior mean
};

class AcChain {
 public:
  explicit AcChain(ProbitData data);

  const ProbitData& data() const { return data_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& sigma_inv_sqrt() const { return sigma_inv_sqrt_; }
  const Eigen::VectorXd& prior_shift() const { return prior_shift_; }
  int n() const { return static_cast<int>(data_.X.rows()); }
  int p() const { return static_cast<int>(data_.X.cols()); }
  bool flat_prior() const { return flat_prior_; }

  Eigen::VectorXd sigma_solve(const Eigen::VectorXd& rhs) const {
    return llt_.solve(rhs);
  }

 private:
  ProbitData data_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd sigma_inv_sqrt_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd prior_shift_;
  bool flat_prior_;
};

// Noise layout: n latent uniforms first, then p normals.
struct AcNoise {
  Eigen::VectorXd u;
  Eigen::VectorXd z;
};

AcNoise ac_draw_noise(const AcChain& chain, RandomStream& stream);
Eigen::VectorXd ac_apply(const AcChain& chain, const Eigen::VectorXd& beta,
                         const AcNoise& noise);
Eigen::VectorXd ac_map(const AcChain& chain, const Eigen::VectorXd& beta,
                       RandomStream& stream);

// Literal two-block Gibbs sweep: draw the n truncated normals, then the
// p-variate normal around Sigma^{-1}(X'Z + Qv).  Consumes the stream in the
// same order as ac_map, so the two coincide pathwise up to rounding.
Eigen::VectorXd ac_gibbs_step(const AcChain& chain, const Eigen::VectorXd& beta,
                              RandomStream& stream);

// d/dt of ac_apply(beta + t*alpha, noise); only the latent uniforms enter.
Eigen::VectorXd ac_path_derivative(const AcChain& chain, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& alpha, double t,
                                   const AcNoise& noise);
Eigen::VectorXd ac_path_derivative(const AcChain& chain, const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& alpha, double t,
                                   RandomStream& stream);

// ---------- Random-effects marginal Gibbs ----------

struct REData {
  int p = 0;                    // number of groups
  int r = 0;                    // replicates per group
  Eigen::VectorXd group_means;  // length p
  double grand_mean = 0.0;      // mean of group means
  double ssw = 0.0;             // within-group sum of squares
  double a1 = 0.0, b1 = 0.0;    // Gamma prior on the effects precision
  double a2 = 0.0, b2 = 0.0;    // Gamma prior on the error precision
};

class ReChain {
 public:
  explicit ReChain(REData data);
  const REData& data() const { return data_; }
  int state_dim() const { return data_.p + 1; }

 private:
  REData data_;
};

// Noise layout: the two unit-rate gamma variates, then p+1 normals
// (z(0) drives the global coordinate).
struct ReNoise {
  double j1 = 0.0;
  double j2 = 0.0;
  Eigen::VectorXd z;
};

// Precisions implied by the current state; exposed because the drift and
// rate analyses need them, not just the next state.
struct ReStep {
  double lambda_theta;
  double lambda_e;
  Eigen::VectorXd eta;
};

ReNoise re_draw_noise(const ReChain& chain, RandomStream& stream);
ReStep re_apply_full(const ReChain& chain, const Eigen::VectorXd& eta,
                     const ReNoise& noise);
Eigen::VectorXd re_apply(const ReChain& chain, const Eigen::VectorXd& eta,
                         const ReNoise& noise);
Eigen::VectorXd re_map(const ReChain& chain, const Eigen::VectorXd& eta,
                       RandomStream& stream);
Eigen::VectorXd re_gibbs_step(const ReChain& chain, const Eigen::VectorXd& eta,
                              RandomStream& stream);

// ---------- Coupled-path simulation ----------

struct DistanceCurve {
  std::vector<double> mean;  // length m+1, index = step
  std::vector<double> se;
  bool biased_start = false;
};

struct ArKernel {
  ArChain chain;
  using Noise = ArNoise;
  Noise draw(RandomStream& s) const { return ar_draw_noise(chain, s); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Noise& nz) const {
    return ar_apply(chain, x, nz);
  }
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return (a - b).norm();
  }
};

struct AcKernel {
  const AcChain& chain;
  using Noise = AcNoise;
  Noise draw(RandomStream& s) const { return ac_draw_noise(chain, s); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Noise& nz) const {
    return ac_apply(chain, x, nz);
  }
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return sigma_norm(a - b, chain.sigma());
  }
};

struct ReKernel {
  const ReChain& chain;
  using Noise = ReNoise;
  Noise draw(RandomStream& s) const { return re_draw_noise(chain, s); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Noise& nz) const {
    return re_apply(chain, x, nz);
  }
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return (a - b).norm();
  }
};

// Reduces a replicate-by-step distance matrix to a mean curve with standard
// errors.  Two-pass variance in fixed replicate order: no cancellation when
// the paths coincide, and bitwise independent of how the rows were produced.
DistanceCurve curve_from_paths(const Eigen::MatrixXd& dist);

// Runs `reps` independent coupled paths, one replicate stream each, sharing
// the per-step noise between the two states; row r of the result holds the
// per-step distances of replicate r.
template <typename Kernel>
Eigen::MatrixXd simulate_coupled_paths(const Kernel& kernel,
                                       const Eigen::VectorXd& x0,
                                       const Eigen::VectorXd& y0, int m,
                                       int reps, std::uint64_t master_seed) {
  if (m < 0 || reps < 1) {
    throw ConfigError("simulate_coupled: need m >= 0 and reps >= 1");
  }
  Eigen::MatrixXd dist(reps, m + 1);
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream s(master_seed, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd x = x0;
    Eigen::VectorXd y = y0;
    dist(rep, 0) = kernel.distance(x, y);
    for (int j = 1; j <= m; ++j) {
      typename Kernel::Noise nz = kernel.draw(s);
      x = kernel.apply(x, nz);
      y = kernel.apply(y, nz);
      dist(rep, j) = kernel.distance(x, y);
    }
  }
  return dist;
}

template <typename Kernel>
DistanceCurve simulate_coupled(const Kernel& kernel, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& y0, int m, int reps,
                               std::uint64_t master_seed) {
  return curve_from_paths(
      simulate_coupled_paths(kernel, x0, y0, m, reps, master_seed));
}

// Distance-to-stationarity proxy: the comparison chain starts from x0 and is
// advanced `burnin` un-coupled steps to stand in for a stationary draw, after
// which the two chains run coupled.  The estimate is biased upward when the
// burnin is too short; rho_hint (an available rate bound) lets the caller pin
// the 10/(1-rho) rule of thumb, and the flag is set when it is violated.
template <typename Kernel>
DistanceCurve estimate_w_to_pi(const Kernel& kernel, const Eigen::VectorXd& x0,
                               int m, int reps, int burnin,
                               std::uint64_t master_seed,
                               double rho_hint = std::nan("")) {
  if (m < 0 || reps < 1 || burnin < 0) {
    throw ConfigError("estimate_w_to_pi: need m >= 0, reps >= 1, burnin >= 0");
  }
  Eigen::MatrixXd dist(reps, m + 1);
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream s(master_seed, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd y = x0;
    for (int b = 0; b < burnin; ++b) {
      y = kernel.apply(y, kernel.draw(s));
    }
    Eigen::VectorXd x = x0;
    dist(rep, 0) = kernel.distance(x, y);
    for (int j = 1; j <= m; ++j) {
      typename Kernel::Noise nz = kernel.draw(s);
      x = kernel.apply(x, nz);
      y = kernel.apply(y, nz);
      dist(rep, j) = kernel.distance(x, y);
    }
  }
  DistanceCurve out = curve_from_paths(dist);
  if (std::isfinite(rho_hint) && rho_hint < 1.0 && rho_hint >= 0.0) {
    out.biased_start = burnin < 10.0 / (1.0 - rho_hint);
  }
  return out;
}

}  // namespace rhobound
