#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rhobound/chains.hpp"
#include "rhobound/errors.hpp"
#include "rhobound/random_stream.hpp"
#include "rhobound/stats.hpp"
#include "rhobound/sym_matrix.hpp"

using namespace rhobound;

namespace {

ProbitData small_probit(std::uint64_t seed, int n, int p, double q_scale) {
  RandomStream s(seed, 0);
  ProbitData d;
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) d.X(i, j) = 0.8 * s.next_normal();
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.y(i) = s.next_uniform() < 0.5 ? 0 : 1;
  d.Q = q_scale * Eigen::MatrixXd::Identity(p, p);
  d.v = Eigen::VectorXd::Zero(p);
  return d;
}

REData small_re() {
  REData d;
  d.p = 5;
  d.r = 4;
  d.group_means.resize(5);
  d.group_means << 0.2, -0.1, 0.4, 0.0, 0.5;
  d.grand_mean = d.group_means.mean();
  d.ssw = 3.7;
  d.a1 = 1.0;
  d.b1 = 1.0;
  d.a2 = 1.0;
  d.b2 = 1.0;
  return d;
}

}  // namespace

// ---------------- autoregression ----------------

TEST_CASE("ar chain rejects non-positive dimension") {
  CHECK_THROWS_AS(ArChain{0}, ConfigError);
  CHECK_NOTHROW(ArChain{1});
}

TEST_CASE("ar map fixes the origin under zero noise") {
  ArChain chain(3);
  ArNoise nz{Eigen::VectorXd::Zero(3)};
  Eigen::VectorXd out = ar_apply(chain, Eigen::VectorXd::Zero(3), nz);
  CHECK(out.norm() == 0.0);
}

TEST_CASE("ar map halves distances under shared noise") {
  ArChain chain(4);
  RandomStream s(11u, 0);
  Eigen::VectorXd x(4), y(4);
  x << 3.0, -1.0, 0.5, 2.0;
  y << -2.0, 4.0, 1.0, -0.5;
  for (int rep = 0; rep < 50; ++rep) {
    ArNoise nz = ar_draw_noise(chain, s);
    Eigen::VectorXd fx = ar_apply(chain, x, nz);
    Eigen::VectorXd fy = ar_apply(chain, y, nz);
    CHECK((fx - fy).norm() ==
          doctest::Approx(0.5 * (x - y).norm()).epsilon(1e-14));
    x = fx;
    y = fy;
  }
}

TEST_CASE("ar one-step moments from the origin match N(0, 3/4 I)") {
  const int n = 100000;
  ArChain chain(3);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (int rep = 0; rep < n; ++rep) {
    RandomStream s(17u, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd z = ar_map(chain, x0, s);
    mean += z;
    cov += z * z.transpose();
  }
  mean /= n;
  cov /= n;
  // se of a mean coordinate: sqrt(3/4/n); of a variance: ~ sqrt(2)*0.75/sqrt(n)
  double se_mean = std::sqrt(0.75 / n);
  double se_var = std::sqrt(2.0) * 0.75 / std::sqrt(static_cast<double>(n));
  double se_cross = 0.75 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean(i)) < 3.0 * se_mean);
    for (int j = 0; j < 3; ++j) {
      double target = i == j ? 0.75 : 0.0;
      double se = i == j ? se_var : se_cross;
      CHECK(std::abs(cov(i, j) - target) < 3.0 * se);
    }
  }
}

// ---------------- probit data augmentation ----------------

TEST_CASE("probit chain validates its inputs") {
  ProbitData d = small_probit(5u, 6, 2, 1.0);

  SUBCASE("well-formed accepted") { CHECK_NOTHROW(AcChain{d}); }
  SUBCASE("response length mismatch") {
    d.y.resize(5);
    CHECK_THROWS_AS(AcChain{d}, ConfigError);
  }
  SUBCASE("non-binary response") {
    d.y(2) = 2;
    CHECK_THROWS_AS(AcChain{d}, ConfigError);
  }
  SUBCASE("prior dimension mismatch") {
    d.Q = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(AcChain{d}, ConfigError);
  }
  SUBCASE("indefinite prior precision") {
    d.Q(0, 0) = -1.0;
    CHECK_THROWS_AS(AcChain{d}, ConfigError);
  }
  SUBCASE("empty design") {
    d.X.resize(0, 2);
    d.y.resize(0);
    CHECK_THROWS_AS(AcChain{d}, ConfigError);
  }
}

TEST_CASE("flat prior with a singular design is rejected at construction") {
  ProbitData d;
  d.X.resize(3, 2);
  d.X << 1.0, 2.0, 2.0, 4.0, -1.0, -2.0;  // rank one
  d.y.resize(3);
  d.y << 1, 0, 1;
  d.Q = Eigen::MatrixXd::Zero(2, 2);
  d.v = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(AcChain{d}, SingularMatrixError);

  // same design becomes fine once the prior regularizes it
  d.Q = Eigen::MatrixXd::Identity(2, 2);
  AcChain chain(d);
  CHECK_FALSE(chain.flat_prior());
  CHECK(chain.prior_shift().norm() == 0.0);  // v = 0
}

TEST_CASE("scalar instance reproduces the median latent update") {
  // n = p = 1, x = 1, y = 1, Q = 1, v = 0, so Sigma = 2; with the median
  // uniform and zero normal the update is Phi^{-1}(3/4)/2
  ProbitData d;
  d.X.resize(1, 1);
  d.X << 1.0;
  d.y.resize(1);
  d.y << 1;
  d.Q.resize(1, 1);
  d.Q << 1.0;
  d.v = Eigen::VectorXd::Zero(1);
  AcChain chain(d);

  AcNoise nz;
  nz.u.resize(1);
  nz.u << 0.5;
  nz.z = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd out = ac_apply(chain, Eigen::VectorXd::Zero(1), nz);
  CHECK(out(0) == doctest::Approx(0.3372448750980408716).epsilon(1e-14));
}

TEST_CASE("mapping form and gibbs sweep agree pathwise from one stream") {
  ProbitData d = small_probit(23u, 12, 3, 2.0);
  d.v = Eigen::VectorXd::Constant(3, 0.4);  // nonzero prior mean
  AcChain chain(d);
  Eigen::VectorXd beta(3);
  beta << 0.3, -0.7, 1.1;
  for (int rep = 0; rep < 20; ++rep) {
    RandomStream s1(31u, static_cast<std::uint64_t>(rep));
    RandomStream s2(31u, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd a = ac_map(chain, beta, s1);
    Eigen::VectorXd b = ac_gibbs_step(chain, beta, s2);
    CHECK((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    CHECK(s1.cursor() == s2.cursor());
    beta = a;
  }
}

TEST_CASE("mapping form and gibbs sweep agree in distribution") {
  ProbitData d = small_probit(29u, 10, 2, 1.0);
  AcChain chain(d);
  Eigen::VectorXd beta(2);
  beta << 0.5, -0.2;
  const int n = 10000;
  std::vector<double> a0, a1, b0, b1;
  for (int rep = 0; rep < n; ++rep) {
    RandomStream s1(37u, static_cast<std::uint64_t>(rep));
    RandomStream s2(37u, static_cast<std::uint64_t>(n + rep));
    Eigen::VectorXd a = ac_map(chain, beta, s1);
    Eigen::VectorXd b = ac_gibbs_step(chain, beta, s2);
    a0.push_back(a(0));
    a1.push_back(a(1));
    b0.push_back(b(0));
    b1.push_back(b(1));
  }
  CHECK(ks_two_sample_pvalue(a0, b0) > 0.01);
  CHECK(ks_two_sample_pvalue(a1, b1) > 0.01);
}

TEST_CASE("probit update is odd under response flip and reflected noise") {
  // flipping every response turns each latent quantile into its mirror image
  // around zero once the state is negated and the stream reflected
  ProbitData d = small_probit(41u, 8, 2, 1.5);
  AcChain chain(d);

  ProbitData flipped = d;
  for (int i = 0; i < 8; ++i) flipped.y(i) = 1 - d.y(i);
  AcChain mirror(flipped);

  RandomStream s(43u, 0);
  Eigen::VectorXd beta(2);
  beta << 0.9, -0.4;
  for (int rep = 0; rep < 25; ++rep) {
    AcNoise nz = ac_draw_noise(chain, s);
    AcNoise reflected;
    reflected.u = Eigen::VectorXd::Ones(8) - nz.u;
    reflected.z = -nz.z;
    Eigen::VectorXd out = ac_apply(chain, beta, nz);
    Eigen::VectorXd neg = ac_apply(mirror, -beta, reflected);
    CHECK((out + neg).norm() <= 1e-12 * (1.0 + out.norm()));
  }
}

TEST_CASE("short run reproduces the long-run posterior mean") {
  ProbitData d = small_probit(47u, 40, 2, 1.0);
  AcChain chain(d);

  RandomStream ref_stream(53u, 0);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);
  for (int burn = 0; burn < 500; ++burn) beta = ac_map(chain, beta, ref_stream);
  Eigen::VectorXd start = beta;  // approximate posterior draw

  Eigen::VectorXd ref_mean = Eigen::VectorXd::Zero(2);
  const int long_steps = 20000;
  for (int t = 0; t < long_steps; ++t) {
    beta = ac_map(chain, beta, ref_stream);
    ref_mean += beta;
  }
  ref_mean /= long_steps;

  RandomStream short_stream(53u, 1);
  Eigen::VectorXd b = start;
  Eigen::VectorXd short_mean = Eigen::VectorXd::Zero(2);
  const int short_steps = 1000;
  for (int t = 0; t < short_steps; ++t) {
    b = ac_map(chain, b, short_stream);
    short_mean += b;
  }
  short_mean /= short_steps;

  // posterior sd ~ 1/sqrt(41); 1e3 correlated draws leave ~0.01 error
  CHECK(std::abs(short_mean(0) - ref_mean(0)) < 0.05);
  CHECK(std::abs(short_mean(1) - ref_mean(1)) < 0.05);
}

TEST_CASE("path derivative vanishes at alpha = 0") {
  ProbitData d = small_probit(59u, 6, 2, 1.0);
  AcChain chain(d);
  RandomStream s(61u, 0);
  AcNoise nz = ac_draw_noise(chain, s);
  Eigen::VectorXd beta(2);
  beta << 0.4, -1.0;
  Eigen::VectorXd out =
      ac_path_derivative(chain, beta, Eigen::VectorXd::Zero(2), 0.3, nz);
  CHECK(out.norm() == 0.0);
}

TEST_CASE("path derivative matches a central finite difference") {
  const double h = 1e-5;
  int inst = 0;
  for (int p : {1, 2, 3}) {
    int n = 4 * p + 2;
    ProbitData d = small_probit(67u + static_cast<std::uint64_t>(p), n, p, 1.0);
    AcChain chain(d);
    RandomStream s(71u + static_cast<std::uint64_t>(p), 0);
    for (int rep = 0; rep < 5; ++rep) {
      AcNoise nz = ac_draw_noise(chain, s);
      Eigen::VectorXd beta(p), alpha(p);
      for (int j = 0; j < p; ++j) {
        beta(j) = s.next_normal();
        alpha(j) = s.next_normal();
      }
      double t = 0.1 + 0.8 * s.next_uniform();
      Eigen::VectorXd grad = ac_path_derivative(chain, beta, alpha, t, nz);
      Eigen::VectorXd hi = ac_apply(chain, beta + (t + h) * alpha, nz);
      Eigen::VectorXd lo = ac_apply(chain, beta + (t - h) * alpha, nz);
      Eigen::VectorXd fd = (hi - lo) / (2.0 * h);
      CHECK((fd - grad).norm() <= 1e-5 * grad.norm());
      ++inst;
    }
  }
  CHECK(inst == 15);
}

TEST_CASE("path derivative is a strict contraction in the Sigma norm") {
  for (double q : {0.0, 1.0}) {
    ProbitData d = small_probit(73u, 9, 3, q);
    AcChain chain(d);
    RandomStream s(79u, 0);
    for (int rep = 0; rep < 100; ++rep) {
      AcNoise nz = ac_draw_noise(chain, s);
      Eigen::VectorXd beta(3), alpha(3);
      for (int j = 0; j < 3; ++j) {
        beta(j) = 2.0 * s.next_normal();
        alpha(j) = s.next_normal();
      }
      double t = s.next_uniform();
      Eigen::VectorXd grad = ac_path_derivative(chain, beta, alpha, t, nz);
      CHECK(sigma_norm(grad, chain.sigma()) <=
            sigma_norm(alpha, chain.sigma()) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("one-step mean contraction holds across state pairs") {
  ProbitData d = small_probit(83u, 30, 2, 1.0);
  AcChain chain(d);
  RandomStream pair_stream(89u, 0);
  for (int pair = 0; pair < 3; ++pair) {
    Eigen::VectorXd beta(2), beta2(2);
    for (int j = 0; j < 2; ++j) {
      beta(j) = 2.0 * pair_stream.next_normal();
      beta2(j) = 2.0 * pair_stream.next_normal();
    }
    double base = sigma_norm(beta - beta2, chain.sigma());
    std::vector<double> dist;
    for (int rep = 0; rep < 1000; ++rep) {
      RandomStream s(97u + static_cast<std::uint64_t>(pair),
                     static_cast<std::uint64_t>(rep));
      AcNoise nz = ac_draw_noise(chain, s);
      Eigen::VectorXd a = ac_apply(chain, beta, nz);
      Eigen::VectorXd b = ac_apply(chain, beta2, nz);
      dist.push_back(sigma_norm(a - b, chain.sigma()));
    }
    auto ms = mean_se(dist);
    CHECK(ms.mean <= base + 3.0 * ms.se);
  }
}

// ---------------- random-effects sampler ----------------

TEST_CASE("random-effects chain validates its inputs") {
  REData d = small_re();
  CHECK_NOTHROW(ReChain{d});

  SUBCASE("too few groups") {
    d.p = 1;
    d.group_means.resize(1);
    d.group_means << 0.2;
    d.grand_mean = 0.2;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
  SUBCASE("no replicates") {
    d.r = 0;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
  SUBCASE("negative within sum of squares") {
    d.ssw = -0.1;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
  SUBCASE("non-positive hyperparameter") {
    d.b2 = 0.0;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
  SUBCASE("inconsistent grand mean") {
    d.grand_mean += 0.01;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
  SUBCASE("group mean length mismatch") {
    d.group_means.resize(4);
    d.group_means << 0.2, -0.1, 0.4, 0.0;
    CHECK_THROWS_AS(ReChain{d}, ConfigError);
  }
}

TEST_CASE("zero state with unit b1 returns the raw gamma variate") {
  ReChain chain(small_re());
  RandomStream s(101u, 0);
  for (int rep = 0; rep < 20; ++rep) {
    ReNoise nz = re_draw_noise(chain, s);
    ReStep step = re_apply_full(chain, Eigen::VectorXd::Zero(6), nz);
    CHECK(step.lambda_theta == nz.j1);
  }
}

TEST_CASE("precisions stay positive along a trajectory") {
  ReChain chain(small_re());
  RandomStream s(103u, 0);
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(6, 2.0);
  for (int t = 0; t < 1000; ++t) {
    ReNoise nz = re_draw_noise(chain, s);
    ReStep step = re_apply_full(chain, eta, nz);
    CHECK(step.lambda_theta > 0.0);
    CHECK(step.lambda_e > 0.0);
    eta = step.eta;
  }
}

TEST_CASE("global coordinate is centred at sqrt(p) times the grand mean") {
  REData d = small_re();
  ReChain chain(d);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(6);
  const int n = 100000;
  std::vector<double> eta0;
  eta0.reserve(n);
  for (int rep = 0; rep < n; ++rep) {
    RandomStream s(107u, static_cast<std::uint64_t>(rep));
    eta0.push_back(re_map(chain, eta, s)(0));
  }
  auto ms = mean_se(eta0);
  double target = std::sqrt(5.0) * d.grand_mean;
  CHECK(std::abs(ms.mean - target) < 3.0 * ms.se);
}

TEST_CASE("mapping form matches the sequential sweep pathwise and in law") {
  ReChain chain(small_re());
  Eigen::VectorXd eta(6);
  eta << 0.3, 0.1, -0.2, 0.5, -0.4, 0.2;

  for (int rep = 0; rep < 20; ++rep) {
    RandomStream s1(109u, static_cast<std::uint64_t>(rep));
    RandomStream s2(109u, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd a = re_map(chain, eta, s1);
    Eigen::VectorXd b = re_gibbs_step(chain, eta, s2);
    CHECK((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    CHECK(s1.cursor() == s2.cursor());
  }

  const int n = 10000;
  std::vector<double> a0, a1, b0, b1;
  for (int rep = 0; rep < n; ++rep) {
    RandomStream s1(113u, static_cast<std::uint64_t>(rep));
    RandomStream s2(113u, static_cast<std::uint64_t>(n + rep));
    Eigen::VectorXd a = re_map(chain, eta, s1);
    Eigen::VectorXd b = re_gibbs_step(chain, eta, s2);
    a0.push_back(a(0));
    a1.push_back(a(1));
    b0.push_back(b(0));
    b1.push_back(b(1));
  }
  CHECK(ks_two_sample_pvalue(a0, b0) > 0.01);
  CHECK(ks_two_sample_pvalue(a1, b1) > 0.01);
}

// ---------------- coupled-path simulation ----------------

TEST_CASE("coupled autoregression curve is the exact geometric decay") {
  ArKernel kernel{ArChain(2)};
  Eigen::VectorXd x0(2), y0(2);
  x0 << 4.0, -3.0;  // distance 5 from y0
  y0 << 0.0, 0.0;
  DistanceCurve curve = simulate_coupled(kernel, x0, y0, 10, 8, 127u);
  REQUIRE(curve.mean.size() == 11);
  for (int j = 0; j <= 10; ++j) {
    CHECK(curve.mean[j] ==
          doctest::Approx(5.0 * std::pow(0.5, j)).epsilon(1e-12));
    CHECK(curve.se[j] <= 1e-12 * curve.mean[0]);
  }
  CHECK_FALSE(curve.biased_start);
}

TEST_CASE("coupling from equal starts stays at zero") {
  ArKernel kernel{ArChain(3)};
  Eigen::VectorXd x0(3);
  x0 << 1.0, 2.0, 3.0;
  DistanceCurve curve = simulate_coupled(kernel, x0, x0, 6, 4, 131u);
  for (double m : curve.mean) CHECK(m == 0.0);
  for (double s : curve.se) CHECK(s == 0.0);
}

TEST_CASE("coupled simulation is reproducible from the master seed") {
  ArKernel kernel{ArChain(2)};
  Eigen::VectorXd x0(2), y0(2);
  x0 << 1.0, 1.0;
  y0 << -1.0, 2.0;
  DistanceCurve a = simulate_coupled(kernel, x0, y0, 5, 16, 137u);
  DistanceCurve b = simulate_coupled(kernel, x0, y0, 5, 16, 137u);
  CHECK(a.mean == b.mean);
  CHECK(a.se == b.se);
  DistanceCurve c = simulate_coupled(kernel, x0, y0, 5, 16, 139u);
  CHECK(a.mean != c.mean);
}

TEST_CASE("coupled simulation validates its arguments") {
  ArKernel kernel{ArChain(1)};
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(simulate_coupled(kernel, x0, x0, -1, 4, 1u), ConfigError);
  CHECK_THROWS_AS(simulate_coupled(kernel, x0, x0, 3, 0, 1u), ConfigError);
}

TEST_CASE("heavily regularized probit couples at least at the design rate") {
  // X = I, Q = 9I gives Sigma = 10I and lambda_max(X Sigma^{-1} X') = 0.1,
  // so the coupled distance must shrink by at least that factor per step
  ProbitData d;
  const int p = 4;
  d.X = Eigen::MatrixXd::Identity(p, p);
  d.y.resize(p);
  d.y << 1, 0, 1, 1;
  d.Q = 9.0 * Eigen::MatrixXd::Identity(p, p);
  d.v = Eigen::VectorXd::Zero(p);
  AcChain chain(d);
  AcKernel kernel{chain};

  Eigen::VectorXd x0(p), y0(p);
  x0 << 2.0, -1.0, 1.0, 0.0;
  y0 << -1.0, 1.0, -2.0, 1.0;
  DistanceCurve curve = simulate_coupled(kernel, x0, y0, 5, 200, 149u);
  std::vector<double> steps, logs;
  for (int j = 0; j <= 5; ++j) {
    REQUIRE(curve.mean[j] > 0.0);
    steps.push_back(static_cast<double>(j));
    logs.push_back(std::log(curve.mean[j]));
  }
  auto fit = fit_line(steps, logs);
  CHECK(fit.slope <= std::log(0.1) + 0.2);
}

TEST_CASE("stationarity gap for the autoregression decays at rate one half") {
  ArKernel kernel{ArChain(2)};
  Eigen::VectorXd x0(2);
  x0 << 5.0, 5.0;
  DistanceCurve curve = estimate_w_to_pi(kernel, x0, 12, 400, 200, 151u, 0.5);
  REQUIRE(curve.mean.size() == 13);
  CHECK_FALSE(curve.biased_start);
  std::vector<double> steps, logs;
  for (int j = 0; j <= 12; ++j) {
    steps.push_back(static_cast<double>(j));
    logs.push_back(std::log(curve.mean[j]));
  }
  auto fit = fit_line(steps, logs);
  double rate = std::exp(fit.slope);
  CHECK(rate == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +- 0.05
  CHECK(std::abs(rate - 0.5) < 0.05);
}

TEST_CASE("zero-step curve is the mean gap to the stationary proxy") {
  ArKernel kernel{ArChain(2)};
  Eigen::VectorXd x0(2);
  x0 << 2.0, -1.0;
  const int reps = 64, burnin = 50;
  DistanceCurve curve = estimate_w_to_pi(kernel, x0, 0, reps, burnin, 157u);
  double manual = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream s(157u, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd y = x0;
    for (int b = 0; b < burnin; ++b) y = kernel.apply(y, kernel.draw(s));
    manual += (x0 - y).norm();
  }
  manual /= reps;
  CHECK(curve.mean[0] == manual);
}

TEST_CASE("standard error scales as the inverse square root of reps") {
  ArKernel kernel{ArChain(2)};
  Eigen::VectorXd x0(2);
  x0 << 2.0, -1.0;
  DistanceCurve small = estimate_w_to_pi(kernel, x0, 0, 250, 40, 163u);
  DistanceCurve big = estimate_w_to_pi(kernel, x0, 0, 1000, 40, 163u);
  double ratio = big.se[0] / small.se[0];
  // quadrupling reps should halve the se, up to sampling noise in the
  // se estimates themselves (~5% relative, so 15% at three sigma)
  CHECK(std::abs(ratio - 0.5) < 0.075);
}

TEST_CASE("short burnin is flagged when a rate hint is available") {
  ArKernel kernel{ArChain(1)};
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  DistanceCurve flagged = estimate_w_to_pi(kernel, x0, 1, 8, 10, 167u, 0.5);
  CHECK(flagged.biased_start);
  DistanceCurve ok = estimate_w_to_pi(kernel, x0, 1, 8, 30, 167u, 0.5);
  CHECK_FALSE(ok.biased_start);
  DistanceCurve no_hint = estimate_w_to_pi(kernel, x0, 1, 8, 0, 167u);
  CHECK_FALSE(no_hint.biased_start);
}
