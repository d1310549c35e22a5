#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rhobound/config.hpp"
#include "rhobound/experiments.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string seed;
  int threads = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drift/minorization and coupling bound experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ar-dm-scan", "single-step bounds for the autoregression over a p-grid"},
      {"ar-multistep-scan", "p-step bounds for the autoregression"},
      {"ac-certify", "probit sampler certificate, bound curves, overlay"},
      {"ac-regimes", "probit regime tables: n-scan, shrinkage, repeated"},
      {"re-certify", "random-effects sampler certificate"},
      {"re-regime-scan", "random-effects rate and TV-coefficient scans"},
      {"couple-sim", "coupled-path distance curves with bootstrap bands"},
  };

  std::map<std::string, SubArgs> args;
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    SubArgs& a = args[name];
    sub->add_option("--config", a.config_path, "config file (key = value lines)");
    sub->add_option("--set", a.overrides, "override KEY=VALUE (repeatable)");
    sub->add_option("--out-dir", a.out_dir, "output directory");
    sub->add_option("--seed", a.seed, "master seed");
    sub->add_option("--threads", a.threads, "worker threads for replicate loops");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rhobound::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const SubArgs& a = args[name];
  try {
    rhobound::ExperimentConfig cfg =
        a.config_path.empty()
            ? rhobound::ExperimentConfig::defaults()
            : rhobound::ExperimentConfig::from_file(a.config_path);
    for (const std::string& kv : a.overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "config error: --set expects KEY=VALUE, got '" << kv
                  << "'\n";
        return rhobound::kExitConfig;
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!a.out_dir.empty()) cfg.set("out_dir", a.out_dir);
    if (!a.seed.empty()) cfg.set("seed", a.seed);
    if (a.threads > 0) cfg.set("threads", std::to_string(a.threads));
    return rhobound::run_command(name, cfg, std::cerr);
  } catch (const rhobound::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rhobound::kExitConfig;
  }
}
