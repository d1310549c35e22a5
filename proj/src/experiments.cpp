#include "rhobound/experiments.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhobound/ac_analysis.hpp"
#include "rhobound/chains.hpp"
#include "rhobound/datagen.hpp"
#include "rhobound/dm_bounds.hpp"
#include "rhobound/io.hpp"
#include "rhobound/re_analysis.hpp"
#include "rhobound/stats.hpp"
#include "rhobound/sym_matrix.hpp"
#include "rhobound/w_bounds.hpp"

namespace rhobound {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

std::string csv_text(const std::string& header,
                     const std::vector<std::string>& rows) {
  std::string out = header + "\n";
  for (const std::string& r : rows) out += r + "\n";
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::analytic:
      return "analytic";
    case Provenance::monte_carlo:
      return "monte_carlo";
    default:
      return "heuristic_sup";
  }
}

const char* distance_name(BoundDistance d) {
  switch (d) {
    case BoundDistance::tv:
      return "tv";
    case BoundDistance::w_psi:
      return "w_psi";
    default:
      return "w_psi2";
  }
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.get_string_or("out_dir", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create out_dir '" + dir.string() +
                      "': " + ec.message());
  }
  return dir;
}

int thread_count(const ExperimentConfig& cfg) {
  const int t = cfg.get_int_or("threads", 1);
  if (t < 1) throw ConfigError("threads must be >= 1");
  return t;
}

// Chunked index loop.  Each index writes only its own result slot and draws
// only from its own replicate stream, so the output is identical for every
// thread count; only the wall clock changes.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  Eigen::initParallel();
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        const int lo = t * chunk;
        const int hi = std::min(count, lo + chunk);
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return RandomStream(master, index).next_u64();
}

// Same path law as simulate_coupled_paths, replicate-chunked.
template <typename Kernel>
Eigen::MatrixXd coupled_paths(const Kernel& kernel, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& y0, int m, int reps,
                              std::uint64_t seed, int threads) {
  if (m < 0 || reps < 1) {
    throw ConfigError("couple-sim: need m >= 0 and reps >= 1");
  }
  Eigen::MatrixXd dist(reps, m + 1);
  parallel_for(reps, threads, [&](int rep) {
    RandomStream s(seed, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd x = x0;
    Eigen::VectorXd y = y0;
    dist(rep, 0) = kernel.distance(x, y);
    for (int j = 1; j <= m; ++j) {
      typename Kernel::Noise nz = kernel.draw(s);
      x = kernel.apply(x, nz);
      y = kernel.apply(y, nz);
      dist(rep, j) = kernel.distance(x, y);
    }
  });
  return dist;
}

// Same path law as estimate_w_to_pi, replicate-chunked.
template <typename Kernel>
DistanceCurve w_to_pi_parallel(const Kernel& kernel, const Eigen::VectorXd& x0,
                               int m, int reps, int burnin, std::uint64_t seed,
                               int threads, double rho_hint) {
  Eigen::MatrixXd dist(reps, m + 1);
  parallel_for(reps, threads, [&](int rep) {
    RandomStream s(seed, static_cast<std::uint64_t>(rep));
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
  });
  DistanceCurve out = curve_from_paths(dist);
  if (std::isfinite(rho_hint) && rho_hint >= 0.0 && rho_hint < 1.0) {
    out.biased_start = burnin < 10.0 / (1.0 - rho_hint);
  }
  return out;
}

SearchConfig search_from(const ExperimentConfig& cfg) {
  SearchConfig s;
  s.directions = cfg.get_int_or("search_directions", s.directions);
  s.ladder = cfg.get_int_or("search_ladder", s.ladder);
  s.refine = cfg.get_int_or("search_refine", s.refine);
  s.seed = cfg.get_seed_or("search_seed", s.seed);
  s.ladder_max = cfg.get_double_or("search_ladder_max", s.ladder_max);
  return s;
}

// The one-step autoregression drift in normalized form: E V(next) <=
// V/4 + 3/4 with V = |x|^2/p, so minorization levels live on the same scale
// for every dimension.
constexpr double kArLambda = 0.25;
constexpr double kArL = 0.75;

std::vector<double> default_ar_levels() {
  return {2.5, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0};
}

BestRate ar_best_rate(int p, const std::vector<double>& levels) {
  return rosenthal_best_rate(kArLambda, kArL, levels,
                             [p](double d) { return ar_gamma_lower(p, d); });
}

// Probit instance shared by ac-certify and couple-sim: CSV paths when given,
// otherwise a generated sequence with an optional isotropic prior precision.
ProbitData ac_instance(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.has("x_csv")) {
    ProbitLoad loaded =
        load_probit_csv(cfg.get_string("x_csv"), cfg.get_string("y_csv"),
                        cfg.get_string_or("q_csv", ""),
                        cfg.get_string_or("v_csv", ""));
    for (const std::string& w : loaded.warnings) log << "warning: " << w << "\n";
    if (!cfg.has("q_csv") && cfg.has("q_scale")) {
      const double kappa = cfg.get_double("q_scale");
      const int p = static_cast<int>(loaded.data.X.cols());
      loaded.data.Q = kappa * Eigen::MatrixXd::Identity(p, p);
    }
    return loaded.data;
  }
  GenSpec gs;
  gs.regime = Regime::fixed_p_growing_n;
  gs.n = cfg.get_int_or("n", 20);
  gs.p = cfg.get_int_or("p", 2);
  gs.k = cfg.get_int_or("k", 1);
  gs.seed = cfg.get_seed_or("data_seed", 7);
  if (cfg.has("beta")) {
    const std::vector<double> b = cfg.get_double_list("beta");
    gs.beta_star = Eigen::Map<const Eigen::VectorXd>(
        b.data(), static_cast<Eigen::Index>(b.size()));
  }
  ProbitData data = gen_probit_sequence(gs, gs.n);
  const double kappa = cfg.get_double_or("q_scale", 1.0);
  if (kappa > 0.0) {
    data.Q = kappa * Eigen::MatrixXd::Identity(gs.p, gs.p);
  }
  return data;
}

REData re_instance(const ExperimentConfig& cfg, int p, int r) {
  REData data;
  if (cfg.get_int_or("null_data", 1) != 0) {
    data.p = p;
    data.r = r;
    data.group_means = Eigen::VectorXd::Zero(p);
    data.grand_mean = 0.0;
    data.ssw = 0.0;
  } else {
    data = gen_re_data(p, r, cfg.get_double_or("mu_star", 0.0),
                       cfg.get_double_or("lam_theta_star", 1.0),
                       cfg.get_double_or("lam_e_star", 1.0),
                       cfg.get_seed_or("data_seed", 7));
  }
  data.a1 = cfg.get_double_or("a1", 1.0);
  data.b1 = cfg.get_double_or("b1", 1.0);
  data.a2 = cfg.get_double_or("a2", 1.0);
  data.b2 = cfg.get_double_or("b2", 1.0);
  return data;
}

json fit_json(const LinearFit& fit) {
  return json{{"slope", fit.slope}, {"intercept", fit.intercept},
              {"r2", fit.r2}};
}

json report_fields(const AssumptionReport& rep) {
  return json{{"statistic", rep.statistic},
              {"se", rep.se},
              {"flag", flag_name(rep.flag)},
              {"note", rep.note}};
}

// ---------- ar-dm-scan ----------

void cmd_ar_dm_scan(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<int> p_grid = cfg.get_int_list_or("p_grid", {5, 10, 20, 40});
  const std::vector<double> levels =
      cfg.get_double_list_or("d_levels", default_ar_levels());
  for (int p : p_grid) {
    if (p < 1) throw ConfigError("ar-dm-scan: p_grid entries must be >= 1");
  }

  std::vector<std::string> rows;
  std::vector<double> ps, log_one_minus_gamma, fit_p, log_one_minus_rho;
  for (int p : p_grid) {
    const double gamma = ar_gamma_lower(p);
    const BestRate best = ar_best_rate(p, levels);
    rows.push_back(csv_row({std::to_string(p), fmt17(gamma), fmt17(best.rate),
                            fmt17(1.0 - best.rate), fmt17(best.d),
                            fmt17(best.a), "analytic"}));
    ps.push_back(static_cast<double>(p));
    log_one_minus_gamma.push_back(std::log(1.0 - gamma));
    if (best.rate < 1.0) {
      fit_p.push_back(static_cast<double>(p));
      log_one_minus_rho.push_back(std::log(1.0 - best.rate));
    }
  }
  const fs::path csv = dir / "ar_dm_scan.csv";
  write_text(csv,
             csv_text("p,gamma_lower,rho_ros_best,one_minus_rho,d_star,a_star,"
                      "provenance",
                      rows));

  json summary;
  summary["schema"] = ExperimentConfig::kSchema;
  summary["command"] = "ar-dm-scan";
  summary["p_grid"] = p_grid;
  summary["gamma_fit"] = fit_json(fit_line(ps, log_one_minus_gamma));
  if (fit_p.size() >= 2) {
    summary["rho_fit"] = fit_json(fit_line(fit_p, log_one_minus_rho));
  } else {
    summary["rho_fit"] = nullptr;
  }
  summary["rows_in_rho_fit"] = fit_p.size();
  write_json(dir / "ar_dm_scan_summary.json", summary);
  log << "ar-dm-scan: wrote " << csv.string() << "\n";
}

// ---------- ar-multistep-scan ----------

void cmd_ar_multistep_scan(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<int> p_grid =
      cfg.get_int_list_or("p_grid", {5, 10, 15, 20, 25, 30});
  const std::vector<double> levels =
      cfg.get_double_list_or("d_levels", default_ar_levels());

  std::vector<std::string> rows;
  for (int p : p_grid) {
    const MultistepBound mb = ar_multistep_bound(p);
    const BestRate single = ar_best_rate(p, levels);
    rows.push_back(csv_row({std::to_string(p), fmt17(mb.per_step_rate),
                            fmt17(mb.rho_p), fmt17(mb.gamma),
                            mb.vacuous ? "1" : "0", fmt17(single.rate),
                            fmt17(single.rate - mb.per_step_rate),
                            "analytic"}));
  }
  const fs::path csv = dir / "ar_multistep_scan.csv";
  write_text(csv,
             csv_text("p,per_step_rate,rho_p,gamma,vacuous,rho_single,gap,"
                      "provenance",
                      rows));
  log << "ar-multistep-scan: wrote " << csv.string() << "\n";
}

// ---------- couple-sim ----------

void bootstrap_ci(const Eigen::MatrixXd& dist, std::uint64_t seed, int B,
                  int threads, std::vector<double>& lo,
                  std::vector<double>& hi) {
  const int reps = static_cast<int>(dist.rows());
  const int cols = static_cast<int>(dist.cols());
  Eigen::MatrixXd boot(B, cols);
  parallel_for(B, threads, [&](int b) {
    RandomStream s(seed, static_cast<std::uint64_t>(b));
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(cols);
    for (int i = 0; i < reps; ++i) {
      acc += dist.row(static_cast<Eigen::Index>(s.next_u64() % reps));
    }
    boot.row(b) = acc / static_cast<double>(reps);
  });
  lo.resize(cols);
  hi.resize(cols);
  std::vector<double> col(B);
  const int ilo = static_cast<int>(std::llround(0.025 * (B - 1)));
  const int ihi = static_cast<int>(std::llround(0.975 * (B - 1)));
  for (int j = 0; j < cols; ++j) {
    for (int b = 0; b < B; ++b) col[b] = boot(b, j);
    std::sort(col.begin(), col.end());
    lo[j] = col[ilo];
    hi[j] = col[ihi];
  }
}

void cmd_couple_sim(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const int threads = thread_count(cfg);
  const std::string which = cfg.get_string_or("chain", "ar");
  const int m = cfg.get_int_or("m", 30);
  const int reps = cfg.get_int_or("reps", 1000);
  const std::uint64_t seed = cfg.get_seed_or("seed", 1);
  const int B = cfg.get_int_or("bootstrap", 200);
  if (B < 2) throw ConfigError("couple-sim: bootstrap must be >= 2");
  const double scale = cfg.get_double_or("start_scale", 1.0);

  Eigen::MatrixXd dist;
  if (which == "ar") {
    const int p = cfg.get_int_or("p", 10);
    ArKernel kernel{ArChain(p)};
    const Eigen::VectorXd x0 = scale * Eigen::VectorXd::Ones(p);
    dist = coupled_paths(kernel, x0, Eigen::VectorXd::Zero(p), m, reps, seed,
                         threads);
  } else if (which == "ac") {
    const ProbitData data = ac_instance(cfg, log);
    const AcChain chain(data);
    AcKernel kernel{chain};
    const int p = chain.p();
    const Eigen::VectorXd x0 = scale * Eigen::VectorXd::Ones(p);
    dist = coupled_paths(kernel, x0, Eigen::VectorXd::Zero(p), m, reps, seed,
                         threads);
  } else if (which == "re") {
    const REData data =
        re_instance(cfg, cfg.get_int_or("p", 10), cfg.get_int_or("r", 100));
    const ReChain chain(data);
    ReKernel kernel{chain};
    const Eigen::VectorXd x0 = scale * Eigen::VectorXd::Ones(data.p + 1);
    dist = coupled_paths(kernel, x0, Eigen::VectorXd::Zero(data.p + 1), m,
                         reps, seed, threads);
  } else {
    throw ConfigError("couple-sim: unknown chain '" + which + "'");
  }

  const DistanceCurve curve = curve_from_paths(dist);
  std::vector<double> lo, hi;
  bootstrap_ci(dist, seed ^ 0x626f6f74ull, B, threads, lo, hi);

  std::vector<std::string> rows;
  for (int j = 0; j <= m; ++j) {
    rows.push_back(csv_row({std::to_string(j), fmt17(curve.mean[j]),
                            fmt17(curve.se[j]), fmt17(lo[j]), fmt17(hi[j]),
                            "monte_carlo"}));
  }
  const fs::path csv = dir / "couple_sim.csv";
  write_text(csv, csv_text("step,mean,se,ci_lo,ci_hi,provenance", rows));
  log << "couple-sim: wrote " << csv.string() << "\n";
}

// ---------- ac-certify ----------

void cmd_ac_certify(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const int threads = thread_count(cfg);
  const ProbitData data = ac_instance(cfg, log);
  const AcChain chain(data);
  const SpectralContext ctx(chain);

  AcAnalysisConfig acfg;
  acfg.d = cfg.get_double_or("d", 0.0);
  acfg.mc_reps = cfg.get_int_or("mc_reps", 512);
  acfg.search = search_from(cfg);
  const AcReport report = ac_certificate(ctx, acfg);
  const AcCertificate& cert = report.cert;

  // Bound curve from a start displaced off the mode; the certificate fixes
  // the rate, the start fixes the prefactor.
  const double offset = cfg.get_double_or("start_offset", 2.0);
  const Eigen::VectorXd start = cert.mode.array() + offset;
  const double v_start =
      std::pow(state_norm(ctx, start - cert.mode), 2) / 2.0;
  ContractionCertificate generic;
  generic.gamma = cert.gamma_ball;
  generic.gamma0 = 1.0;
  generic.lambda = cert.lambda_drift;
  generic.L = 2.0;
  generic.d = cert.d;
  generic.c = 2.0 * ctx.p();
  const double prefactor = general_prefactor(generic, v_start, cert.rho0);

  const int m_max = cfg.get_int_or("m_max", 50);
  if (m_max < 0) throw ConfigError("ac-certify: m_max must be >= 0");
  std::vector<double> w_curve(m_max + 1);
  double w = prefactor;
  for (int j = 0; j <= m_max; ++j) {
    w_curve[j] = w;
    w *= cert.rho0;
  }
  double c_lip = 0.0;
  for (const auto& [key, value] : report.tv_bound.prefactor_params) {
    if (key == "c_lip") c_lip = value;
  }
  const TvCurve tv = madras_tv_from_w(c_lip, w_curve);

  std::vector<std::string> rows;
  for (int j = 0; j <= m_max; ++j) {
    const double tv_j = j == 0 ? 1.0 : tv.tv[j - 1];
    rows.push_back(csv_row({std::to_string(j), fmt17(w_curve[j]), fmt17(tv_j),
                            provenance_name(report.w_bound.provenance)}));
  }
  write_text(dir / "ac_bound_curve.csv",
             csv_text("m,w_bound,tv_bound,provenance", rows));

  // Measured distance to stationarity from the same start, burnin proxy.
  const int overlay_m = cfg.get_int_or("overlay_m", 10);
  const int overlay_reps = cfg.get_int_or("overlay_reps", 200);
  const int burnin_cap = cfg.get_int_or("burnin_cap", 5000);
  const int burnin = static_cast<int>(std::min<double>(
      burnin_cap, std::ceil(10.0 / (1.0 - cert.rho0)) + 1.0));
  const std::uint64_t overlay_seed =
      cfg.get_seed_or("overlay_seed", cfg.get_seed_or("seed", 1) ^ 0xf00dull);
  AcKernel kernel{chain};
  const DistanceCurve overlay =
      w_to_pi_parallel(kernel, start, overlay_m, overlay_reps, burnin,
                       overlay_seed, threads, cert.rho0);
  std::vector<std::string> orows;
  for (int j = 0; j <= overlay_m; ++j) {
    orows.push_back(csv_row({std::to_string(j), fmt17(overlay.mean[j]),
                             fmt17(overlay.se[j]), "monte_carlo"}));
  }
  write_text(dir / "ac_overlay.csv", csv_text("step,mean,se,provenance", orows));

  json out;
  out["schema"] = ExperimentConfig::kSchema;
  out["command"] = "ac-certify";
  out["n"] = ctx.n();
  out["p"] = ctx.p();
  json jc;
  jc["lambda_drift"] = cert.lambda_drift;
  jc["gamma_ball"] = cert.gamma_ball;
  jc["d"] = cert.d;
  jc["a"] = cert.a;
  jc["rho0"] = cert.rho0;
  jc["mode"] = std::vector<double>(cert.mode.data(),
                                   cert.mode.data() + cert.mode.size());
  json jprov;
  for (const auto& [key, value] : cert.provenance) {
    jprov[key] = provenance_name(value);
  }
  jc["provenance"] = jprov;
  out["certificate"] = jc;

  const auto bound_json = [&](const GeomBound& b) {
    json jb;
    jb["rate"] = b.rate;
    jb["distance"] = distance_name(b.distance);
    jb["provenance"] = provenance_name(b.provenance);
    jb["a"] = b.a;
    jb["interval"] = {b.interval_lo, b.interval_hi};
    jb["geometric"] = b.geometric;
    json params;
    for (const auto& [key, value] : b.prefactor_params) params[key] = value;
    jb["params"] = params;
    return jb;
  };
  json jw = bound_json(report.w_bound);
  jw["start_offset"] = offset;
  jw["v_start"] = v_start;
  jw["prefactor"] = prefactor;
  out["w_bound"] = jw;
  json jt = bound_json(report.tv_bound);
  jt["prefactor"] = 0.5 * c_lip * prefactor;  // applies from step one onward
  out["tv_bound"] = jt;

  const AssumptionReport c1 = check_assumption(data, Assumption::c1);
  const AssumptionReport c2 = check_assumption(data, Assumption::c2);
  if (c1.flag == CheckFlag::pass && c2.statistic < 1.0) {
    out["shrinkage"] =
        json{{"bound", shrinkage_bound(ctx)}, {"provenance", "analytic"}};
  }
  out["overlay"] = json{{"reps", overlay_reps},
                        {"burnin", burnin},
                        {"biased_start", overlay.biased_start}};
  write_json(dir / "ac_certificate.json", out);
  log << "ac-certify: rho0 = " << fmt17(cert.rho0) << "\n";
}

// ---------- ac-regimes ----------

void regimes_nscan(const ExperimentConfig& cfg, const fs::path& dir,
                   std::ostream& log) {
  const int threads = thread_count(cfg);
  const std::vector<int> p_list = cfg.get_int_list_or("p_list", {2, 4, 8});
  const std::vector<int> n_grid =
      cfg.get_int_list_or("n_grid", {1000, 2500, 5000, 10000});
  const int per_cell = cfg.get_int_or("n_reps", 8);
  const int mc_budget = cfg.get_int_or("mc_budget", 20000);
  const double beta_value = cfg.get_double_or("beta_value", 3.0);
  const int k = cfg.get_int_or("k", 1);
  const std::uint64_t seed = cfg.get_seed_or("seed", 1);
  if (per_cell < 2) throw ConfigError("ac-regimes: n_reps must be >= 2");

  std::vector<std::string> rows;
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    const int p = p_list[pi];
    GenSpec gs;
    gs.regime = Regime::fixed_p_growing_n;
    gs.p = p;
    gs.beta_star = sparse_beta(p, k, beta_value);
    gs.seed = derive_seed(seed, 0x1000 + pi);
    const AssumptionReport b4 = check_assumption(gs, Assumption::b4, mc_budget);
    const double target = 1.0 - 0.5 * b4.statistic;
    const double target_se = 0.5 * b4.se;

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const int n = n_grid[ni];
      std::vector<double> vals(per_cell);
      parallel_for(per_cell, threads, [&](int i) {
        GenSpec cell = gs;
        cell.n = n;
        cell.seed = derive_seed(
            seed, (pi << 40) | (ni << 20) | static_cast<std::uint64_t>(i));
        const ProbitData data = gen_probit_sequence(cell, n);
        const AcChain chain(data);
        const SpectralContext ctx(chain);
        SearchConfig scfg = search_from(cfg);
        scfg.seed = derive_seed(cell.seed, 0x5ea7);
        vals[i] = rho_hat_2(ctx, scfg).value;
      });
      const MeanSe ms = mean_se(vals);
      rows.push_back(csv_row({std::to_string(p), std::to_string(n),
                              fmt17(ms.mean), fmt17(ms.se), fmt17(target),
                              fmt17(target_se), "heuristic_sup"}));
    }
  }
  const fs::path csv = dir / "ac_regimes_nscan.csv";
  write_text(csv,
             csv_text("p,n,rho_mean,rho_se,target,target_se,provenance", rows));
  log << "ac-regimes: wrote " << csv.string() << "\n";
}

void regimes_shrinkage(const ExperimentConfig& cfg, const fs::path& dir,
                       std::ostream& log) {
  const int n = cfg.get_int_or("shrink_n", 50);
  const int p = cfg.get_int_or("shrink_p", 5);
  const std::vector<double> kappa_grid = cfg.get_double_list_or(
      "kappa_grid", {1, 2, 4, 8, 16, 32, 64, 128});
  GenSpec gs;
  gs.regime = Regime::shrinkage;
  gs.n = n;
  gs.p = p;
  gs.k = 1;
  gs.seed = cfg.get_seed_or("data_seed", 7);
  ProbitData data = gen_probit_sequence(gs, n);
  const double mu_max = eig_extremes(data.X.transpose() * data.X).max;

  std::vector<std::string> rows;
  for (double kappa : kappa_grid) {
    if (kappa <= 0.0) {
      throw ConfigError("ac-regimes: kappa_grid entries must be positive");
    }
    data.Q = kappa * Eigen::MatrixXd::Identity(p, p);
    const AcChain chain(data);
    const SpectralContext ctx(chain);
    rows.push_back(csv_row({fmt17(kappa), fmt17(shrinkage_bound(ctx)),
                            fmt17(mu_max / (mu_max + kappa)), "analytic"}));
  }
  const fs::path csv = dir / "ac_regimes_shrinkage.csv";
  write_text(csv,
             csv_text("kappa,certified_bound,eig_reference,provenance", rows));
  log << "ac-regimes: wrote " << csv.string() << "\n";
}

void regimes_repeated(const ExperimentConfig& cfg, const fs::path& dir,
                      std::ostream& log) {
  const int threads = thread_count(cfg);
  const std::vector<int> k_grid = cfg.get_int_list_or("k_grid", {2, 4, 8, 16});
  const std::vector<int> r_grid =
      cfg.get_int_list_or("r_grid", {60, 200, 400, 3000});
  if (k_grid.size() != r_grid.size()) {
    throw ConfigError("ac-regimes: k_grid and r_grid must have equal length");
  }
  const int seeds = cfg.get_int_or("seeds", 20);
  const double epsilon = cfg.get_double_or("epsilon", 0.05);
  const std::uint64_t seed = cfg.get_seed_or("seed", 1);
  if (seeds < 2) throw ConfigError("ac-regimes: seeds must be >= 2");

  std::vector<std::string> rows;
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    const int k = k_grid[ki];
    const int r = r_grid[ki];
    if (k < 2 || r < 1) {
      throw ConfigError("ac-regimes: need k >= 2 and r >= 1");
    }
    const Eigen::MatrixXd xtilde = Eigen::MatrixXd::Identity(k, k);
    const std::vector<int> reps(static_cast<std::size_t>(k), r);
    const Eigen::VectorXd beta = Eigen::VectorXd::Ones(k);

    std::vector<double> vals(seeds);
    double g_hat = 0.0;
    parallel_for(seeds, threads, [&](int i) {
      const std::uint64_t data_seed =
          derive_seed(seed ^ 0x7e9eull, (ki << 32) | static_cast<std::uint64_t>(i));
      const ProbitData data =
          gen_repeated_design(xtilde, reps, beta, InverseLink::probit, data_seed);
      const AcChain chain(data);
      const SpectralContext ctx(chain);
      SearchConfig scfg = search_from(cfg);
      scfg.seed = derive_seed(data_seed, 0x5ea7);
      vals[i] = rho_hat_2(ctx, scfg).value;
      if (i == 0) {
        const AssumptionReport d4 =
            check_assumption(data, Assumption::d4, 0, beta);
        g_hat = link_margin(InverseLink::probit, d4.statistic);
      }
    });
    const double threshold = 1.0 - 0.5 * g_hat + epsilon;
    int exceed = 0;
    for (double v : vals) exceed += v > threshold ? 1 : 0;
    const MeanSe ms = mean_se(vals);
    rows.push_back(csv_row(
        {std::to_string(k), std::to_string(r), std::to_string(k * r),
         fmt17(g_hat), fmt17(threshold),
         fmt17(static_cast<double>(exceed) / seeds), fmt17(ms.mean),
         fmt17(ms.se), "heuristic_sup"}));
  }
  const fs::path csv = dir / "ac_regimes_repeated.csv";
  write_text(
      csv,
      csv_text("k,r,n,g_hat,threshold,exceed_fraction,rho_mean,rho_se,"
               "provenance",
               rows));
  log << "ac-regimes: wrote " << csv.string() << "\n";
}

void cmd_ac_regimes(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  std::stringstream ss(cfg.get_string_or("tables", "nscan,shrinkage,repeated"));
  std::string tok;
  std::vector<std::string> tables;
  while (std::getline(ss, tok, ',')) tables.push_back(tok);
  if (tables.empty()) throw ConfigError("ac-regimes: no tables requested");
  for (const std::string& t : tables) {
    if (t == "nscan") {
      regimes_nscan(cfg, dir, log);
    } else if (t == "shrinkage") {
      regimes_shrinkage(cfg, dir, log);
    } else if (t == "repeated") {
      regimes_repeated(cfg, dir, log);
    } else {
      throw ConfigError("ac-regimes: unknown table '" + t + "'");
    }
  }
}

// ---------- re-certify ----------

void cmd_re_certify(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const int p = cfg.get_int_or("p", 32);
  const int r = cfg.get_int_or("r", p * p);
  const double delta = cfg.get_double_or("delta", 0.5);
  const int a_grid = cfg.get_int_or("a_grid", 128);
  const REData data = re_instance(cfg, p, r);

  const ReCertificate cert = re_rate(data, delta, a_grid);
  const ReValidity validity = re_validity(data, delta);
  const AssumptionReport e1 = check_assumption(data, Assumption::e1);
  const AssumptionReport e2 = check_assumption(data, Assumption::e2);

  json out;
  out["schema"] = ExperimentConfig::kSchema;
  out["command"] = "re-certify";
  out["p"] = data.p;
  out["r"] = data.r;
  out["delta"] = delta;
  out["hyperparameters"] = json{
      {"a1", data.a1}, {"b1", data.b1}, {"a2", data.a2}, {"b2", data.b2}};
  out["certificate"] = json{{"lambda", cert.lambda},
                            {"L", cert.L},
                            {"gamma", cert.gamma},
                            {"gamma0", cert.gamma0},
                            {"a", cert.a},
                            {"rho_a", cert.rho_a},
                            {"tv_coeff", cert.tv_coeff},
                            {"provenance", provenance_name(cert.provenance)}};
  out["validity"] = json{{"drift_ok", validity.drift_ok},
                         {"contraction_ok", validity.contraction_ok},
                         {"small_set_ok", validity.small_set_ok}};
  out["checks"] = json{{"e1", report_fields(e1)}, {"e2", report_fields(e2)}};
  write_json(dir / "re_certificate.json", out);
  log << "re-certify: rho_a = " << fmt17(cert.rho_a) << "\n";
}

// ---------- re-regime-scan ----------

void cmd_re_regime_scan(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = ensure_out_dir(cfg);
  const std::vector<int> p_grid =
      cfg.get_int_list_or("p_grid", {8, 16, 32, 64, 128});
  const double delta = cfg.get_double_or("delta", 0.5);
  std::vector<int> r_list;
  if (cfg.has("r_list")) {
    r_list = cfg.get_int_list("r_list");
    if (r_list.size() != p_grid.size()) {
      throw ConfigError("re-regime-scan: r_list must match p_grid in length");
    }
  } else {
    for (int p : p_grid) r_list.push_back(p * p);
  }

  const double nan = std::nan("");
  std::vector<std::string> rows;
  std::vector<double> rho_feasible;
  bool strictly_decreasing = true;
  double prev = nan;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const REData data = re_instance(cfg, p_grid[i], r_list[i]);
    const AssumptionReport e1 = check_assumption(data, Assumption::e1);
    const AssumptionReport e2 = check_assumption(data, Assumption::e2);
    const double tv_coeff = re_tv_lipschitz(data);
    bool feasible = true;
    double a = nan, rho_a = nan;
    ReDriftConstants drift{};
    ReContraction contr{};
    try {
      const ReCertificate cert = re_rate(data, delta, cfg.get_int_or("a_grid", 128));
      drift = {cert.lambda, cert.L};
      contr = {cert.gamma, cert.gamma0};
      a = cert.a;
      rho_a = cert.rho_a;
    } catch (const InfeasibleError&) {
      feasible = false;
      drift = re_drift_constants(data);
      contr = re_contraction(data, delta);
    }
    rows.push_back(csv_row(
        {std::to_string(data.p), std::to_string(data.r), feasible ? "1" : "0",
         fmt17(drift.lambda), fmt17(drift.L), fmt17(contr.gamma),
         fmt17(contr.gamma0), fmt17(a), fmt17(rho_a), fmt17(tv_coeff),
         fmt17(e1.statistic), fmt17(e2.statistic), "analytic"}));
    if (feasible) {
      if (!rho_feasible.empty() && rho_a >= prev) strictly_decreasing = false;
      rho_feasible.push_back(rho_a);
      prev = rho_a;
    }
  }
  const fs::path csv = dir / "re_regime_scan.csv";
  write_text(csv, csv_text("p,r,feasible,lambda,L,gamma,gamma0,a,rho_a,"
                           "tv_coeff,e1,e2,provenance",
                           rows));

  // Kernel-Lipschitz growth in the replicate count at fixed p.
  const int rscan_p = cfg.get_int_or("rscan_p", 5);
  const std::vector<int> r_grid =
      cfg.get_int_list_or("r_grid", {100, 300, 1000, 3000});
  std::vector<std::string> trows;
  std::vector<double> log_r, log_tv;
  for (int r : r_grid) {
    const REData data = re_instance(cfg, rscan_p, r);
    const double coeff = re_tv_lipschitz(data);
    trows.push_back(csv_row({std::to_string(r), fmt17(coeff), "analytic"}));
    log_r.push_back(std::log(static_cast<double>(r)));
    log_tv.push_back(std::log(coeff));
  }
  write_text(dir / "re_tv_rscan.csv", csv_text("r,tv_coeff,provenance", trows));

  json summary;
  summary["schema"] = ExperimentConfig::kSchema;
  summary["command"] = "re-regime-scan";
  summary["p_grid"] = p_grid;
  summary["r_list"] = r_list;
  summary["delta"] = delta;
  summary["rho_a_feasible"] = rho_feasible;
  summary["strictly_decreasing"] =
      strictly_decreasing && rho_feasible.size() >= 2;
  summary["min_rho_a"] =
      rho_feasible.empty()
          ? json(nullptr)
          : json(*std::min_element(rho_feasible.begin(), rho_feasible.end()));
  summary["rscan_p"] = rscan_p;
  summary["tv_loglog"] = log_r.size() >= 2 ? fit_json(fit_line(log_r, log_tv))
                                           : json(nullptr);
  write_json(dir / "re_regime_summary.json", summary);
  log << "re-regime-scan: wrote " << csv.string() << "\n";
}

}  // namespace

std::vector<std::string> command_names() {
  return {"ar-dm-scan",  "ar-multistep-scan", "ac-certify", "ac-regimes",
          "re-certify", "re-regime-scan",    "couple-sim"};
}

int run_command(const std::string& name, const ExperimentConfig& cfg,
                std::ostream& log) {
  try {
    if (name == "ar-dm-scan") {
      cmd_ar_dm_scan(cfg, log);
    } else if (name == "ar-multistep-scan") {
      cmd_ar_multistep_scan(cfg, log);
    } else if (name == "ac-certify") {
      cmd_ac_certify(cfg, log);
    } else if (name == "ac-regimes") {
      cmd_ac_regimes(cfg, log);
    } else if (name == "re-certify") {
      cmd_re_certify(cfg, log);
    } else if (name == "re-regime-scan") {
      cmd_re_regime_scan(cfg, log);
    } else if (name == "couple-sim") {
      cmd_couple_sim(cfg, log);
    } else {
      log << "unknown command '" << name << "'\n";
      return kExitConfig;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    log << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace rhobound
