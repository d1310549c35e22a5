#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rhobound/errors.hpp"

namespace rhobound {

// Everything a chain analysis must certify for the generic two-regime
// Wasserstein bound: contraction factor gamma on the level set {V <= d},
// expansion factor gamma0 off it, drift (lambda, L), and the constant c
// relating the coupling metric to the drift function,
// psi(x,y) <= c (V(x) + V(y) + 1).
struct ContractionCertificate {
  double gamma = 0.0;
  double gamma0 = 0.0;
  double lambda = 0.0;
  double L = 0.0;
  double d = 0.0;
  double c = 1.0;
};

void validate_certificate(const ContractionCertificate& cert);

enum class BoundDistance { tv, w_psi, w_psi2 };
enum class Provenance { analytic, monte_carlo, heuristic_sup };

// A produced convergence bound: distance(K_x^m, target) <= prefactor * rate^m.
// The producer is responsible for honesty of `provenance` and must only set
// `geometric` when rate < 1.
struct GeomBound {
  double rate = 0.0;
  std::vector<std::pair<std::string, double>> prefactor_params;
  BoundDistance distance = BoundDistance::w_psi;
  Provenance provenance = Provenance::analytic;
  double a = std::numeric_limits<double>::quiet_NaN();
  double interval_lo = std::numeric_limits<double>::quiet_NaN();
  double interval_hi = std::numeric_limits<double>::quiet_NaN();
  bool geometric = false;
};

// One-regime bound c_x/(1-gamma) * gamma^m.  The power is accumulated by
// repeated multiplication so consecutive values differ by exactly gamma.
double classical_bound(double c_x, double gamma, int m);

struct AdmissibleInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;
};

// Open interval of exponents for which both regimes contract.  When
// gamma0 <= 1 the upper end is one; otherwise the off-set regime caps it and
// the interval can be empty.
AdmissibleInterval admissible_a_interval(const ContractionCertificate& cert);

// rho_a = max(gamma^a (2L+1)^{1-a}, gamma0^a ((lambda d+2L+1)/(d+1))^{1-a});
// below one for every a in the admissible interval (enforced).
double general_rate(const ContractionCertificate& cert, double a);

// c ((lambda+1) V_x + L + 1) / (1 - rho_a)
double general_prefactor(const ContractionCertificate& cert, double V_x,
                         double rho_a);

struct RateSelection {
  double a = 0.0;
  double rho = 0.0;
  std::vector<double> a_grid;
  std::vector<double> rho_curve;
};

// Minimizes general_rate over a 256-point grid inside the admissible
// interval; throws InfeasibleError when the interval is empty.
RateSelection select_rate(const ContractionCertificate& cert);

struct TvCurve {
  std::vector<double> tv;
  bool clamped = false;
};

// Kernel-Lipschitz conversion: element j bounds the total-variation gap
// after j+1 steps by (c_lip/2) * w_curve[j].  Values are clamped at one,
// with the flag recording that the clamp fired.
TvCurve madras_tv_from_w(double c_lip, const std::vector<double>& w_curve);

}  // namespace rhobound
