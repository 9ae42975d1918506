// storenet_cli: scenario runner for the replication-network lab.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "storenet/error.hpp"
#include "storenet/harness.hpp"

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::string out = ".";
  double regime_tol = 0.0;
  bool serial = false;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace storenet;

  CLI::App app{"Finite-capacity replication network: simulation and scaling checks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Scenario INI file")->required();
  app.add_option("--seed", g.seed, "Override sim.seed");
  app.add_option("--replicas", g.replicas, "Override sim.replicas")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--regime-tol", g.regime_tol, "Tolerance for calling rho = beta_bar critical")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--serial", g.serial, "Run replicas on one thread");

  const std::vector<std::string> names = {"simulate",   "fluid",     "compare", "fastchain",
                                          "hitting",    "martingale", "diffusion", "all"};
  for (const auto& n : names) app.add_subcommand(n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ScenarioConfig config;
  try {
    config = load_config(g.config);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (g.seed) config.seed = *g.seed;
  if (g.replicas) config.replicas = *g.replicas;

  HarnessOptions opts;
  opts.out_dir = g.out;
  opts.regime_tol = g.regime_tol;
  opts.execution = g.serial ? Execution::Serial : Execution::Parallel;

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json result;
    bool ok = true;
    if (cmd == "simulate") {
      result = run_simulate(config, opts);
    } else if (cmd == "fluid") {
      result = run_fluid(config, opts);
    } else if (cmd == "compare") {
      result = run_compare(config, opts);
    } else {
      std::vector<Check> which;
      if (cmd == "all")
        which = {Check::FastChain, Check::Hitting, Check::Martingale, Check::Diffusion};
      else
        which = {parse_check(cmd)};
      result = run_report_bundle(config, which, opts);
      ok = bundle_passed(result);
    }
    std::cout << result.dump(2) << '\n';
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == "CONFIG_ERROR" || e.code() == "INIT_OUTSIDE_S" ? 2 : 1;
  }
}
