#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rhobound/chains.hpp"
#include "rhobound/random_stream.hpp"
#include "rhobound/re_analysis.hpp"
#include "rhobound/stats.hpp"
#include "rhobound/w_bounds.hpp"

using namespace rhobound;

namespace {

REData null_data(int p, int r, double a1 = 1.0, double b1 = 1.0,
                 double a2 = 1.0, double b2 = 1.0) {
  REData d;
  d.p = p;
  d.r = r;
  d.group_means = Eigen::VectorXd::Zero(p);
  d.grand_mean = 0.0;
  d.ssw = 0.0;
  d.a1 = a1;
  d.b1 = b1;
  d.a2 = a2;
  d.b2 = b2;
  return d;
}

REData signed_data(int p, int r) {
  REData d = null_data(p, r);
  for (int i = 0; i < p; ++i) d.group_means(i) = i % 2 == 0 ? 0.5 : -0.5;
  d.ssw = 3.0;
  return d;
}

Eigen::VectorXd random_state(RandomStream& st, int p, double norm) {
  Eigen::VectorXd eta(p + 1);
  for (int i = 0; i <= p; ++i) eta(i) = st.next_normal();
  return norm / eta.norm() * eta;
}

// L1 distance between two Gamma densities with common shape, by Simpson
// quadrature over a generous range.
double gamma_l1(double shape, double q1, double q2) {
  const double hi = (shape + 40.0) / std::min(q1, q2);
  const int n = 40000;  // intervals (even)
  const double h = hi / n;
  const auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double base = (shape - 1.0) * std::log(t) - std::lgamma(shape);
    const double g1 = std::exp(shape * std::log(q1) + base - q1 * t);
    const double g2 = std::exp(shape * std::log(q2) + base - q2 * t);
    return std::abs(g1 - g2);
  };
  double acc = f(0.0) + f(hi);
  for (int i = 1; i < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("drift constants: closed-form pins and validation") {
  SUBCASE("balanced null data") {
    const ReDriftConstants c = re_drift_constants(null_data(10, 100));
    CHECK(c.lambda == doctest::Approx(0.424).epsilon(1e-15));
    CHECK(c.L == doctest::Approx(0.040024).epsilon(1e-15));
  }

  SUBCASE("group spread and within-group scatter only enter the offset") {
    const ReDriftConstants c = re_drift_constants(signed_data(10, 100));
    CHECK(c.lambda == doctest::Approx(0.424).epsilon(1e-15));
    CHECK(c.L == doctest::Approx(0.39006).epsilon(1e-14));
  }

  SUBCASE("rejects degenerate inputs") {
    CHECK_THROWS_AS(re_drift_constants(null_data(1, 50)), ConfigError);
    REData bad = null_data(6, 9);
    bad.b1 = 0.0;
    CHECK_THROWS_AS(re_drift_constants(bad), ConfigError);
    bad = null_data(6, 9);
    bad.group_means = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(re_drift_constants(bad), ConfigError);
  }
}

TEST_CASE("drift factor scaled by p stays bounded under quadratic replication") {
  double prev = std::numeric_limits<double>::infinity();
  for (int p : {8, 16, 32, 64, 128}) {
    const ReDriftConstants c = re_drift_constants(null_data(p, p * p));
    CHECK(c.lambda < 1.0);
    CHECK(p * c.lambda <= 4.5);
    CHECK(p * c.lambda <= prev);
    prev = p * c.lambda;
  }
}

TEST_CASE("one-step expectation of the drift value respects the envelope") {
  const REData data = null_data(10, 100);
  const ReChain chain(data);
  const ReDriftConstants c = re_drift_constants(data);
  RandomStream pick(0x5e01, 0);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd eta =
        random_state(pick, 10, 0.5 + 6.0 * pick.next_uniform());
    RandomStream st(0x5e02, static_cast<std::uint64_t>(k));
    const int reps = 300;
    std::vector<double> vals(reps);
    for (int rep = 0; rep < reps; ++rep)
      vals[static_cast<std::size_t>(rep)] = v_re(data, re_map(chain, eta, st));
    const MeanSe ms = mean_se(vals);
    CHECK(ms.mean <= c.lambda * v_re(data, eta) + c.L + 3.0 * ms.se);
  }
}

TEST_CASE("drift value: minimizer, convexity, quadratic rays") {
  REData d = null_data(4, 7);
  d.group_means << 0.9, -0.3, 0.4, 0.2;
  d.grand_mean = d.group_means.mean();

  SUBCASE("vanishes at the centering point") {
    Eigen::VectorXd eta(5);
    eta(0) = 2.0 * d.grand_mean;  // sqrt(p) * grand mean with p = 4
    for (int i = 0; i < 4; ++i) eta(i + 1) = d.group_means(i) - d.grand_mean;
    CHECK(v_re(d, eta) <= 1e-25);
  }

  SUBCASE("midpoint value never exceeds the average") {
    RandomStream st(0x5e03, 0);
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd x = random_state(st, 4, 3.0 * st.next_uniform());
      const Eigen::VectorXd y = random_state(st, 4, 3.0 * st.next_uniform());
      CHECK(v_re(d, 0.5 * (x + y)) <=
            0.5 * (v_re(d, x) + v_re(d, y)) + 1e-12);
    }
  }

  SUBCASE("pure quadratic scaling when the data are centered") {
    const REData n = null_data(4, 7);
    RandomStream st(0x5e04, 0);
    const Eigen::VectorXd eta = random_state(st, 4, 1.3);
    CHECK(v_re(n, 4.0 * eta) ==
          doctest::Approx(16.0 * v_re(n, eta)).epsilon(1e-12));
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(v_re(d, Eigen::VectorXd::Zero(4)), ConfigError);
  }
}

TEST_CASE("contraction functional: pins, monotonicity, saturation") {
  SUBCASE("balanced null instance") {
    CHECK(re_varrho(null_data(10, 100), 1.0) ==
          doctest::Approx(1.0482).epsilon(1e-15));
  }

  SUBCASE("spread instance exercises the between-group block") {
    CHECK(re_varrho(signed_data(10, 100), 11.0) ==
          doctest::Approx(1.2902203687374749499).epsilon(1e-14));
  }

  SUBCASE("weakly increasing in the frozen scale") {
    const REData d = signed_data(12, 60);
    double prev = 0.0;
    for (double b2v : {1.0, 2.0, 10.0, 1e3, 1e6, 1e12}) {
      const double cur = re_varrho(d, b2v);
      CHECK(cur >= prev);
      prev = cur;
    }
  }

  SUBCASE("both capped terms saturate") {
    const REData d = signed_data(12, 60);
    CHECK(re_varrho(d, 1e300) ==
          re_varrho(d, std::numeric_limits<double>::infinity()));
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(re_varrho(null_data(3, 50), 1.0), ConfigError);
    CHECK_THROWS_AS(re_varrho(null_data(10, 100), 0.5), ConfigError);
  }
}

TEST_CASE("contraction constants shrink along the quadratic-replication scan") {
  const double expected[] = {1.3225208840985677, 0.94477967938463039,
                             0.68213135637424919, 0.49562641872254246,
                             0.36184110977914516};
  const int ps[] = {8, 16, 32, 64, 128};
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 5; ++k) {
    const REData d = null_data(ps[k], ps[k] * ps[k]);
    const ReContraction c = re_contraction(d, 0.5);
    CHECK(c.gamma == doctest::Approx(expected[k]).epsilon(1e-12));
    CHECK(c.gamma < prev);
    prev = c.gamma;
    CHECK(c.gamma0 / std::sqrt(double(ps[k])) <= 0.65);
    CHECK(c.gamma0 ==
          std::sqrt(re_varrho(d, std::numeric_limits<double>::infinity())));
  }
}

TEST_CASE("coupled steps contract as certified, inside and outside the set") {
  const REData data = null_data(16, 256);
  const ReChain chain(data);
  const ReContraction c = re_contraction(data, 0.5);
  CHECK(c.gamma == doctest::Approx(0.94477967938463039).epsilon(1e-12));

  // null data: V(eta) = |eta|^2 / p, so the paired set {V + V' <= 2} is a
  // Euclidean ball constraint on the pair
  RandomStream pick(0x5e05, 0);
  const auto coupled_mean = [&](const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
    const int reps = 400;
    std::vector<double> gaps(reps);
    for (int rep = 0; rep < reps; ++rep) {
      RandomStream st(0x5e06, static_cast<std::uint64_t>(rep));
      const ReNoise nz = re_draw_noise(chain, st);
      gaps[static_cast<std::size_t>(rep)] =
          (re_apply(chain, x, nz) - re_apply(chain, y, nz)).norm();
    }
    return mean_se(gaps);
  };

  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = random_state(pick, 16, 3.5);
    const Eigen::VectorXd y = random_state(pick, 16, 3.5);
    CHECK(v_re(data, x) + v_re(data, y) <= 2.0);
    const MeanSe ms = coupled_mean(x, y);
    CHECK(ms.mean <= c.gamma * (x - y).norm() + 3.0 * ms.se);
  }
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = random_state(pick, 16, 12.0);
    const Eigen::VectorXd y = random_state(pick, 16, 12.0);
    CHECK(v_re(data, x) + v_re(data, y) > 2.0);
    const MeanSe ms = coupled_mean(x, y);
    CHECK(ms.mean <= c.gamma0 * (x - y).norm() + 3.0 * ms.se);
  }
}

TEST_CASE("rate certificates: frozen scan and assembly identity") {
  const double rho_pins[] = {0.88570211764792216, 0.79384020114362149,
                             0.71469431022809879};
  const double a_pins[] = {0.33090391531537983, 0.33077084300923860,
                           0.33075307481221391};
  const int ps[] = {32, 64, 128};
  double prev = 1.0;
  for (int k = 0; k < 3; ++k) {
    const REData d = null_data(ps[k], ps[k] * ps[k]);
    const ReCertificate cert = re_rate(d, 0.5);
    CHECK(cert.rho_a == doctest::Approx(rho_pins[k]).epsilon(1e-12));
    CHECK(cert.a == doctest::Approx(a_pins[k]).epsilon(1e-12));
    CHECK(cert.rho_a < prev);
    prev = cert.rho_a;
    CHECK(cert.a > 0.0);
    CHECK(cert.a < 0.5 / 1.5);
    CHECK(cert.provenance == Provenance::analytic);
    CHECK(cert.tv_coeff > 0.0);

    // reassemble the published rate formula by hand
    const double dd = std::pow(double(ps[k]), 0.25);
    const double off = (cert.lambda * dd + 2.0 * cert.L + 1.0) / (dd + 1.0);
    const double byhand =
        std::max(std::pow(cert.gamma, cert.a) *
                     std::pow(2.0 * cert.L + 1.0, 1.0 - cert.a),
                 std::pow(cert.gamma0, cert.a) * std::pow(off, 1.0 - cert.a));
    CHECK(cert.rho_a == doctest::Approx(byhand).epsilon(1e-12));
  }

  SUBCASE("below the regime the assembly is infeasible") {
    CHECK_THROWS_AS(re_rate(null_data(8, 64), 0.5), InfeasibleError);
    CHECK_THROWS_AS(re_rate(null_data(16, 256), 0.5), InfeasibleError);
  }

  SUBCASE("grid size must be positive") {
    CHECK_THROWS_AS(re_rate(null_data(32, 1024), 0.5, 0), ConfigError);
  }
}

TEST_CASE("certified curve dominates the measured approach to stationarity") {
  struct Instance {
    int p, r;
    double rho_pin;
  };
  for (const Instance inst : {Instance{10, 100, 0.99797083293446088},
                              Instance{16, 256, 0.92228764897650854}}) {
    const REData data = null_data(inst.p, inst.r, 6.0, 2.0, 1.0, 1.0);
    const ReCertificate cert = re_rate(data, 0.5);
    CHECK(cert.rho_a == doctest::Approx(inst.rho_pin).epsilon(1e-12));

    ContractionCertificate generic;
    generic.gamma = cert.gamma;
    generic.gamma0 = cert.gamma0;
    generic.lambda = cert.lambda;
    generic.L = cert.L;
    generic.d = std::pow(double(inst.p), 0.25);
    generic.c = 2.0 * inst.p;

    const ReChain chain(data);
    const Eigen::VectorXd start =
        Eigen::VectorXd::Constant(inst.p + 1, 1.2);
    const double pref =
        general_prefactor(generic, v_re(data, start), cert.rho_a);

    const ReKernel kernel{chain};
    const DistanceCurve west = estimate_w_to_pi(
        kernel, start, 5, 250, 500, 0x5e07 + static_cast<std::uint64_t>(inst.p));
    double bound = pref;
    for (int m = 0; m <= 5; ++m) {
      CHECK(bound >= west.mean[static_cast<std::size_t>(m)] -
                         3.0 * west.se[static_cast<std::size_t>(m)]);
      bound *= cert.rho_a;
    }
  }
}

TEST_CASE("kernel coefficient: pin, replication scaling, distance cap") {
  SUBCASE("smallest instance") {
    CHECK(re_tv_lipschitz(null_data(2, 1)) ==
          doctest::Approx(41.028174593052023).epsilon(1e-13));
  }

  SUBCASE("normalized coefficient settles as replication grows") {
    const double pins[] = {10.088909079117427, 9.8422032292824686,
                           9.8177180637803039};
    const int rs[] = {10, 100, 1000};
    double k_prev = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double k =
          re_tv_lipschitz(null_data(5, rs[i])) /
          (std::pow(double(rs[i]), 1.5) * 5.0);
      CHECK(k == doctest::Approx(pins[i]).epsilon(1e-12));
      if (i == 2) CHECK(std::abs(k / k_prev - 1.0) < 0.005);
      k_prev = k;
    }
  }

  SUBCASE("bounds the full-conditional scale L1 distances for nearby states") {
    REData d = null_data(2, 1);
    d.group_means << 0.3, -0.2;
    d.grand_mean = 0.05;
    Eigen::VectorXd eta(3), etap(3);
    eta << 0.1, 0.2, -0.1;
    etap << 0.15, 0.3, -0.2;

    const auto scale_theta = [&](const Eigen::VectorXd& e) {
      return d.b1 + 0.5 * (e(1) * e(1) + e(2) * e(2));
    };
    const auto scale_err = [&](const Eigen::VectorXd& e) {
      double acc = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double u = e(i + 1) + e(0) / std::sqrt(2.0) - d.group_means(i);
        acc += u * u;
      }
      return d.b2 + 0.5 * d.ssw + 0.5 * d.r * acc;
    };

    const double l1_theta = gamma_l1(2.0, scale_theta(eta), scale_theta(etap));
    const double l1_err = gamma_l1(2.0, scale_err(eta), scale_err(etap));
    CHECK(l1_theta == doctest::Approx(0.041442383259866130).epsilon(1e-6));
    CHECK(l1_err == doctest::Approx(0.0040074605770238838).epsilon(1e-6));
    CHECK(l1_theta + l1_err <=
          re_tv_lipschitz(d) * (eta - etap).norm());
  }

  SUBCASE("needs at least two groups") {
    CHECK_THROWS_AS(re_tv_lipschitz(null_data(1, 30)), ConfigError);
  }
}

TEST_CASE("feasibility flags report the regime without throwing") {
  const ReValidity ok = re_validity(null_data(16, 256), 0.5);
  CHECK(ok.drift_ok);
  CHECK(ok.contraction_ok);
  CHECK(ok.small_set_ok);

  const ReValidity low = re_validity(null_data(8, 64), 0.5);
  CHECK(low.drift_ok);
  CHECK_FALSE(low.contraction_ok);
  CHECK(low.small_set_ok);

  const ReValidity mid = re_validity(null_data(10, 100), 0.5);
  CHECK(mid.drift_ok);
  CHECK_FALSE(mid.contraction_ok);
}
