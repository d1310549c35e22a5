#pragma once

#include <Eigen/Dense>

#include "rhobound/chains.hpp"
#include "rhobound/w_bounds.hpp"

namespace rhobound {

// Closed-form convergence constants for the random-effects marginal Gibbs
// chain. Everything here is a formula in (p, r, prior hyperparameters,
// sufficient statistics); no sampling is involved, so certificates produced
// by this header carry analytic provenance.

struct ReDriftConstants {
  double lambda = 0.0;
  double L = 0.0;
};

// Affine envelope for the one-step expectation of the drift value:
// E V(next) <= lambda * V(current) + L. Requires p >= 2.
ReDriftConstants re_drift_constants(const REData& data);

// Drift value at a state (eta_0 is the scaled global mean).
double v_re(const REData& data, const Eigen::VectorXd& eta);

// Squared contraction functional evaluated with the error-precision scale
// parameter frozen at b2_val. Increasing b2_val can only weaken (raise) the
// result; +infinity puts both capped terms at their ceilings. Requires
// p >= 4 and b2_val >= the prior scale.
double re_varrho(const REData& data, double b2_val);

struct ReContraction {
  double gamma = 0.0;   // inside the small set {V(x) + V(y) <= p^(delta/2)}
  double gamma0 = 0.0;  // everywhere
};

ReContraction re_contraction(const REData& data, double delta);

// Per-instance feasibility of the certificate machinery; reported as flags
// rather than a hard threshold on p because the regime boundary depends on
// the data and hyperparameters.
struct ReValidity {
  bool drift_ok = false;        // lambda < 1
  bool contraction_ok = false;  // gamma < 1
  bool small_set_ok = false;    // p^(delta/2) > 2L / (1 - lambda)
};

ReValidity re_validity(const REData& data, double delta);

struct ReCertificate {
  double lambda = 0.0;
  double L = 0.0;
  double gamma = 0.0;
  double gamma0 = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double rho_a = 0.0;
  double tv_coeff = 0.0;
  Provenance provenance = Provenance::analytic;
};

// Assembles the full rate certificate: drift and contraction constants,
// small set of radius p^(delta/2), and the rate minimized over a_grid
// points of the admissible exponent interval intersected with
// (0, min(delta/(1+delta), 2/3)). Throws InfeasibleError when the instance
// is outside the contraction regime (lambda or gamma >= 1, small set too
// small, or empty exponent interval).
ReCertificate re_rate(const REData& data, double delta, int a_grid = 128);

// Kernel Lipschitz coefficient on the integrated-L1 scale, evaluated at the
// instance's own (p, r) rather than maximized over p. Scales like r^(3/2) p.
// Requires p >= 2.
double re_tv_lipschitz(const REData& data);

}  // namespace rhobound
