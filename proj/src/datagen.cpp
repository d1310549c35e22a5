#include "rhobound/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "rhobound/errors.hpp"
#include "rhobound/ac_analysis.hpp"
#include "rhobound/special_functions.hpp"
#include "rhobound/sym_matrix.hpp"

namespace rhobound {

namespace {

constexpr std::uint64_t kResponseStreamBase = std::uint64_t{1} << 32;
constexpr std::uint64_t kDirectionSeed = 0xd19ec7104a3b5ull;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void require_iid_regime(const GenSpec& spec, const char* who) {
  if (spec.regime != Regime::fixed_p_growing_n &&
      spec.regime != Regime::shrinkage)
    throw ConfigError(std::string(who) + ": regime has no iid covariate rows");
}

// groups identical rows by exact comparison; returns per-row-pattern counts
std::map<std::vector<double>, int> row_groups(const Eigen::MatrixXd& X) {
  std::map<std::vector<double>, int> groups;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> key(X.row(i).begin(), X.row(i).end());
    ++groups[key];
  }
  return groups;
}

AssumptionReport inapplicable(Assumption which, const char* input) {
  throw ConfigError("check_assumption: " + assumption_name(which) +
                    " is not checkable from " + input);
}

}  // namespace

double inverse_link(InverseLink link, double mu) {
  if (link == InverseLink::probit) return std_normal_cdf(mu);
  if (mu >= 0.0) return 1.0 / (1.0 + std::exp(-mu));
  const double e = std::exp(mu);
  return e / (1.0 + e);
}

double link_margin(InverseLink link, double mu) {
  return inverse_link(link, -std::abs(mu));
}

Eigen::VectorXd sparse_beta(int p, int k, double value) {
  if (p < 1) throw ConfigError("sparse_beta: p must be >= 1");
  if (k < 0 || k > p) throw ConfigError("sparse_beta: need 0 <= k <= p");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta.head(k).setConstant(value);
  return beta;
}

Eigen::VectorXd resolved_beta(const GenSpec& spec) {
  if (spec.beta_star.size() > 0) {
    if (spec.beta_star.size() != spec.p)
      throw ConfigError("resolved_beta: beta_star length does not match p");
    return spec.beta_star;
  }
  return sparse_beta(spec.p, spec.k);
}

ProbitData gen_probit_sequence(const GenSpec& spec, int n) {
  require_iid_regime(spec, "gen_probit_sequence");
  if (n < 1) throw ConfigError("gen_probit_sequence: n must be >= 1");
  const int p = spec.p;
  const Eigen::VectorXd beta = resolved_beta(spec);

  ProbitData data;
  data.X.resize(n, p);
  data.y.resize(n);
  data.Q = Eigen::MatrixXd::Zero(p, p);
  data.v = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < n; ++i) {
    RandomStream st(spec.seed, static_cast<std::uint64_t>(i));
    for (int j = 0; j < p; ++j) data.X(i, j) = st.next_normal();
    const double g = inverse_link(spec.link, data.X.row(i).dot(beta));
    data.y(i) = st.next_uniform() < g ? 1 : 0;
  }
  return data;
}

Eigen::MatrixXd sample_design(int q, int p, std::uint64_t seed) {
  if (q < 1 || p < 1) throw ConfigError("sample_design: dims must be >= 1");
  Eigen::MatrixXd xtilde(q, p);
  for (int i = 0; i < q; ++i) {
    RandomStream st(seed, static_cast<std::uint64_t>(i));
    for (int j = 0; j < p; ++j) xtilde(i, j) = st.next_normal();
  }
  return xtilde;
}

ProbitData gen_repeated_design(const Eigen::MatrixXd& xtilde,
                               const std::vector<int>& reps,
                               const Eigen::VectorXd& beta_star,
                               InverseLink link, std::uint64_t seed) {
  const int q = static_cast<int>(xtilde.rows());
  const int p = static_cast<int>(xtilde.cols());
  if (q < 1 || p < 1)
    throw ConfigError("gen_repeated_design: design must be nonempty");
  if (static_cast<int>(reps.size()) != q)
    throw ConfigError("gen_repeated_design: one replication count per row");
  if (beta_star.size() != p)
    throw ConfigError("gen_repeated_design: beta_star length does not match");
  long n = 0;
  for (int ri : reps) {
    if (ri < 1) throw ConfigError("gen_repeated_design: counts must be >= 1");
    n += ri;
  }

  ProbitData data;
  data.X.resize(n, p);
  data.y.resize(n);
  data.Q = Eigen::MatrixXd::Zero(p, p);
  data.v = Eigen::VectorXd::Zero(p);
  long row = 0;
  for (int i = 0; i < q; ++i) {
    const double g = inverse_link(link, xtilde.row(i).dot(beta_star));
    RandomStream st(seed, kResponseStreamBase + static_cast<std::uint64_t>(i));
    for (int j = 0; j < reps[static_cast<std::size_t>(i)]; ++j, ++row) {
      data.X.row(row) = xtilde.row(i);
      data.y(row) = st.next_uniform() < g ? 1 : 0;
    }
  }
  return data;
}

REData gen_re_data(int p, int r, double mu_star, double lam_theta_star,
                   double lam_e_star, std::uint64_t seed) {
  if (p < 1 || r < 1) throw ConfigError("gen_re_data: dims must be >= 1");
  if (!(lam_theta_star > 0.0) || !(lam_e_star > 0.0) ||
      !std::isfinite(mu_star))
    throw ConfigError("gen_re_data: precisions must be positive");
  const double sd_theta = 1.0 / std::sqrt(lam_theta_star);
  const double sd_e = 1.0 / std::sqrt(lam_e_star);

  REData data;
  data.p = p;
  data.r = r;
  data.group_means.resize(p);
  data.ssw = 0.0;
  data.a1 = data.b1 = data.a2 = data.b2 = 1.0;
  std::vector<double> ys(static_cast<std::size_t>(r));
  for (int i = 0; i < p; ++i) {
    RandomStream st(seed, static_cast<std::uint64_t>(i));
    const double theta = sd_theta * st.next_normal();
    double sum = 0.0;
    for (int j = 0; j < r; ++j) {
      ys[static_cast<std::size_t>(j)] = mu_star + theta + sd_e * st.next_normal();
      sum += ys[static_cast<std::size_t>(j)];
    }
    const double mean = sum / r;
    data.group_means(i) = mean;
    for (int j = 0; j < r; ++j) {
      const double d = ys[static_cast<std::size_t>(j)] - mean;
      data.ssw += d * d;
    }
  }
  data.grand_mean = data.group_means.mean();
  return data;
}

std::string assumption_name(Assumption which) {
  switch (which) {
    case Assumption::b1: return "B1";
    case Assumption::b2: return "B2";
    case Assumption::b3: return "B3";
    case Assumption::b4: return "B4";
    case Assumption::c1: return "C1";
    case Assumption::c2: return "C2";
    case Assumption::d1: return "D1";
    case Assumption::d2: return "D2";
    case Assumption::d3: return "D3";
    case Assumption::d4: return "D4";
    case Assumption::e1: return "E1";
    case Assumption::e2: return "E2";
  }
  throw ConfigError("assumption_name: unknown value");
}

std::string flag_name(CheckFlag flag) {
  switch (flag) {
    case CheckFlag::pass: return "pass";
    case CheckFlag::fail: return "fail";
    case CheckFlag::indeterminate: return "indeterminate";
  }
  throw ConfigError("flag_name: unknown value");
}

namespace {

AssumptionReport second_moment_spectrum(const ProbitData& data) {
  const double n = static_cast<double>(data.X.rows());
  const Eigen::MatrixXd s = data.X.transpose() * data.X / n;
  const EigExtremes ext = eig_extremes(s);
  AssumptionReport rep;
  rep.which = Assumption::b1;
  rep.statistic = ext.min;
  rep.note = "empirical second moment; lambda_max=" + fmt(ext.max);
  return rep;
}

AssumptionReport fourth_moment(const ProbitData& data) {
  AssumptionReport rep;
  rep.which = Assumption::b2;
  rep.statistic = data.X.rowwise().squaredNorm().array().square().mean();
  rep.note = "empirical E||x||^4; no finite-sample pass criterion";
  return rep;
}

AssumptionReport degeneracy_probe(const ProbitData& data) {
  const Eigen::Index n = data.X.rows();
  const Eigen::Index p = data.X.cols();
  const Eigen::VectorXd row_norms = data.X.rowwise().norm();
  const double deltas[] = {0.1, 0.01, 0.001};
  double sups[] = {0.0, 0.0, 0.0};
  for (int j = 0; j < 100; ++j) {
    RandomStream st(kDirectionSeed, static_cast<std::uint64_t>(j));
    Eigen::VectorXd alpha(p);
    for (Eigen::Index c = 0; c < p; ++c) alpha(c) = st.next_normal();
    const double an = alpha.norm();
    const Eigen::VectorXd proj = (data.X * alpha).cwiseAbs();
    for (int d = 0; d < 3; ++d) {
      Eigen::Index hits = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (proj(i) <= deltas[d] * row_norms(i) * an) ++hits;
      sups[d] = std::max(sups[d], static_cast<double>(hits) / n);
    }
  }
  AssumptionReport rep;
  rep.which = Assumption::b3;
  rep.statistic = sups[2];
  rep.note = "sup over 100 directions of P(|x'a| <= delta|x||a|); delta=0.1:" +
             fmt(sups[0]) + " 0.01:" + fmt(sups[1]) + " 0.001:" + fmt(sups[2]);
  return rep;
}

AssumptionReport damped_moment_floor(const ProbitData& data,
                                     const Eigen::VectorXd& beta_star,
                                     InverseLink link) {
  if (beta_star.size() != data.X.cols())
    throw ConfigError("check_assumption: B4 needs beta_star of length p");
  const double n = static_cast<double>(data.X.rows());
  const Eigen::MatrixXd a = data.X.transpose() * data.X / n;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(data.X.cols(), data.X.cols());
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    const double w = link_margin(link, data.X.row(i).dot(beta_star));
    b.noalias() += w * data.X.row(i).transpose() * data.X.row(i);
  }
  b /= n;
  const Eigen::MatrixXd root = inv_sqrt(a);
  Eigen::MatrixXd m = root * b * root;
  m = 0.5 * (m + m.transpose()).eval();
  AssumptionReport rep;
  rep.which = Assumption::b4;
  rep.statistic = eig_extremes(m).min;
  rep.note = "empirical whitened margin-damped second moment";
  return rep;
}

AssumptionReport prior_definite(const ProbitData& data) {
  AssumptionReport rep;
  rep.which = Assumption::c1;
  const EigExtremes ext = eig_extremes(data.Q);
  rep.statistic = ext.min;
  rep.flag = ext.min > 0.0 ? CheckFlag::pass : CheckFlag::fail;
  if (data.Q.cwiseAbs().maxCoeff() == 0.0) rep.note = "flat prior";
  return rep;
}

AssumptionReport prior_dominates(const ProbitData& data) {
  AssumptionReport rep;
  rep.which = Assumption::c2;
  try {
    const Eigen::MatrixXd root = inv_sqrt(data.Q);
    Eigen::MatrixXd m = root * (data.X.transpose() * data.X) * root;
    m = 0.5 * (m + m.transpose()).eval();
    rep.statistic = eig_extremes(m).max;
    rep.flag = CheckFlag::pass;
    rep.note = "lambda_max(X Q^-1 X')";
  } catch (const SingularMatrixError&) {
    rep.statistic = std::numeric_limits<double>::infinity();
    rep.flag = CheckFlag::fail;
    rep.note = "prior precision not positive-definite";
  }
  return rep;
}

AssumptionReport information_definite(const ProbitData& data) {
  const Eigen::MatrixXd s = data.X.transpose() * data.X + data.Q;
  const EigExtremes ext = eig_extremes(s);
  AssumptionReport rep;
  rep.which = Assumption::d1;
  rep.statistic = ext.min;
  rep.flag = ext.min > s.rows() * 1e-12 * std::max(ext.max, 0.0)
                 ? CheckFlag::pass
                 : CheckFlag::fail;
  rep.note = "lambda_min(X'X + Q)";
  return rep;
}

AssumptionReport concentration_width(const ProbitData& data) {
  const AcChain chain(data);
  const SpectralContext ctx(chain);
  AssumptionReport rep;
  rep.which = Assumption::d2;
  const double p = static_cast<double>(data.X.cols());
  rep.statistic = hoeffding_sigma(ctx) * std::sqrt(2.0 * std::log(p));
  rep.note = "sigma sqrt(2 log p); limit statement";
  return rep;
}

AssumptionReport replication_ratio(const ProbitData& data) {
  const auto groups = row_groups(data.X);
  int rmin = std::numeric_limits<int>::max();
  for (const auto& g : groups) rmin = std::min(rmin, g.second);
  const double q = static_cast<double>(groups.size());
  AssumptionReport rep;
  rep.which = Assumption::d3;
  rep.statistic = rmin / std::log(q);
  rep.note = "r_min / log q; q=" + fmt(q) + " r_min=" + fmt(double(rmin));
  return rep;
}

AssumptionReport signal_ceiling(const ProbitData& data,
                                const Eigen::VectorXd& beta_star,
                                InverseLink link) {
  if (beta_star.size() != data.X.cols())
    throw ConfigError("check_assumption: D4 needs beta_star of length p");
  const double stat = (data.X * beta_star).cwiseAbs().maxCoeff();
  AssumptionReport rep;
  rep.which = Assumption::d4;
  rep.statistic = stat;
  rep.note = "max |x'beta*|; link margin there=" +
             fmt(link_margin(link, stat));
  return rep;
}

AssumptionReport law_degeneracy_probe(const GenSpec& spec, int mc_budget) {
  const int p = spec.p;
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(100);
  for (int j = 0; j < 100; ++j) {
    RandomStream st(kDirectionSeed, static_cast<std::uint64_t>(j));
    Eigen::VectorXd alpha(p);
    for (int c = 0; c < p; ++c) alpha(c) = st.next_normal();
    dirs.push_back(alpha / alpha.norm());
  }
  const double deltas[] = {0.1, 0.01, 0.001};
  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(100, 3);
  Eigen::VectorXd x(p);
  for (int i = 0; i < mc_budget; ++i) {
    RandomStream st(spec.seed ^ 0xb3ull, static_cast<std::uint64_t>(i));
    for (int c = 0; c < p; ++c) x(c) = st.next_normal();
    const double xn = x.norm();
    for (int j = 0; j < 100; ++j) {
      const double t = std::abs(dirs[static_cast<std::size_t>(j)].dot(x));
      for (int d = 0; d < 3; ++d)
        if (t <= deltas[d] * xn) hits(j, d) += 1.0;
    }
  }
  hits /= mc_budget;
  AssumptionReport rep;
  rep.which = Assumption::b3;
  rep.statistic = hits.col(2).maxCoeff();
  rep.se = std::sqrt(rep.statistic * (1.0 - rep.statistic) / mc_budget);
  rep.note = "law MC, sup over 100 directions; delta=0.1:" +
             fmt(hits.col(0).maxCoeff()) + " 0.01:" + fmt(hits.col(1).maxCoeff()) +
             " 0.001:" + fmt(hits.col(2).maxCoeff());
  return rep;
}

AssumptionReport law_damped_moment_floor(const GenSpec& spec, int mc_budget) {
  const int p = spec.p;
  const Eigen::VectorXd beta = resolved_beta(spec);
  const std::uint64_t seed = spec.seed ^ 0xb4ull;

  // the law's second moment is the identity, so no whitening is needed
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd x(p);
  for (int i = 0; i < mc_budget; ++i) {
    RandomStream st(seed, static_cast<std::uint64_t>(i));
    for (int c = 0; c < p; ++c) x(c) = st.next_normal();
    const double w = link_margin(spec.link, x.dot(beta));
    m.noalias() += w * x * x.transpose();
  }
  m /= mc_budget;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const int which_min = 0;  // ascending eigenvalues
  const double stat = eig.eigenvalues()(which_min);
  const Eigen::VectorXd v = eig.eigenvectors().col(which_min);

  // delta-method error bar: replay the draws and take the sd of the
  // minimizing quadratic form
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < mc_budget; ++i) {
    RandomStream st(seed, static_cast<std::uint64_t>(i));
    for (int c = 0; c < p; ++c) x(c) = st.next_normal();
    const double w = link_margin(spec.link, x.dot(beta));
    const double t = v.dot(x);
    const double s = w * t * t;
    s1 += s;
    s2 += s * s;
  }
  const double var = std::max(0.0, s2 / mc_budget - (s1 / mc_budget) * (s1 / mc_budget));
  AssumptionReport rep;
  rep.which = Assumption::b4;
  rep.statistic = stat;
  rep.se = std::sqrt(var / mc_budget);
  rep.note = "law MC margin-damped moment floor; draws=" + fmt(double(mc_budget));
  return rep;
}

}  // namespace

AssumptionReport check_assumption(const ProbitData& data, Assumption which,
                                  int mc_budget,
                                  const Eigen::VectorXd& beta_star,
                                  InverseLink link) {
  (void)mc_budget;  // the instance supplies the sample
  if (data.X.rows() < 1 || data.X.cols() < 1)
    throw ConfigError("check_assumption: empty design");
  switch (which) {
    case Assumption::b1: return second_moment_spectrum(data);
    case Assumption::b2: return fourth_moment(data);
    case Assumption::b3: return degeneracy_probe(data);
    case Assumption::b4: return damped_moment_floor(data, beta_star, link);
    case Assumption::c1: return prior_definite(data);
    case Assumption::c2: return prior_dominates(data);
    case Assumption::d1: return information_definite(data);
    case Assumption::d2: return concentration_width(data);
    case Assumption::d3: return replication_ratio(data);
    case Assumption::d4: return signal_ceiling(data, beta_star, link);
    case Assumption::e1:
    case Assumption::e2: return inapplicable(which, "a probit instance");
  }
  throw ConfigError("check_assumption: unknown assumption");
}

AssumptionReport check_assumption(const GenSpec& spec, Assumption which,
                                  int mc_budget) {
  switch (which) {
    case Assumption::b1: {
      require_iid_regime(spec, "check_assumption");
      AssumptionReport rep;
      rep.which = which;
      rep.statistic = 1.0;
      rep.note = "identity second moment, exact";
      return rep;
    }
    case Assumption::b2: {
      require_iid_regime(spec, "check_assumption");
      AssumptionReport rep;
      rep.which = which;
      const double p = spec.p;
      rep.statistic = p * (p + 2.0);
      rep.note = "E||x||^4 = p(p+2), exact";
      return rep;
    }
    case Assumption::b3:
      require_iid_regime(spec, "check_assumption");
      if (mc_budget < 1)
        throw ConfigError("check_assumption: B3 needs a Monte Carlo budget");
      return law_degeneracy_probe(spec, mc_budget);
    case Assumption::b4:
      require_iid_regime(spec, "check_assumption");
      if (mc_budget < 2)
        throw ConfigError("check_assumption: B4 needs a Monte Carlo budget");
      return law_damped_moment_floor(spec, mc_budget);
    case Assumption::d3: {
      if (spec.regime != Regime::repeated_measures)
        return inapplicable(which, "this spec");
      if (spec.q < 1 || spec.r < 1)
        throw ConfigError("check_assumption: D3 needs q, r >= 1");
      AssumptionReport rep;
      rep.which = which;
      rep.statistic = spec.r / std::log(static_cast<double>(spec.q));
      rep.note = "r / log q from spec dimensions";
      return rep;
    }
    case Assumption::e1: {
      if (spec.regime != Regime::random_effects)
        return inapplicable(which, "this spec");
      if (spec.p < 1 || spec.r < 1)
        throw ConfigError("check_assumption: E1 needs p, r >= 1");
      AssumptionReport rep;
      rep.which = which;
      const double p = spec.p, r = spec.r;
      rep.statistic = r * r / (p * p * p);
      rep.note = "r^2/p^3; limit statement";
      return rep;
    }
    default:
      return inapplicable(which, "a generating spec");
  }
}

AssumptionReport check_assumption(const REData& data, Assumption which) {
  if (data.p < 1 || data.r < 1)
    throw ConfigError("check_assumption: empty layout");
  AssumptionReport rep;
  rep.which = which;
  switch (which) {
    case Assumption::e1: {
      const double p = data.p, r = data.r;
      rep.statistic = r * r / (p * p * p);
      rep.note = "r^2/p^3; limit statement";
      return rep;
    }
    case Assumption::e2: {
      const double ssb_over_p =
          (data.group_means.array() - data.grand_mean).square().mean();
      const double sw = data.ssw / (static_cast<double>(data.r) * data.p);
      rep.statistic = std::max(ssb_over_p, sw);
      rep.flag = std::isfinite(ssb_over_p) && std::isfinite(sw)
                     ? CheckFlag::pass
                     : CheckFlag::fail;
      rep.note = "between=" + fmt(ssb_over_p) + " within=" + fmt(sw);
      return rep;
    }
    default:
      return inapplicable(which, "a one-way layout");
  }
}

std::vector<AssumptionReport> check_assumptions(
    const ProbitData& data, const std::vector<Assumption>& which,
    int mc_budget, const Eigen::VectorXd& beta_star, InverseLink link) {
  std::vector<AssumptionReport> out;
  out.reserve(which.size());
  for (Assumption w : which)
    out.push_back(check_assumption(data, w, mc_budget, beta_star, link));
  return out;
}

}  // namespace rhobound
