// qthermo command-line front end: run / validate scenario configs.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>

#include "scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qthermo: driven-qubit thermodynamics scenarios"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  bool tol_set = false;
  int threads = 0;

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config, "scenario config file (JSON)")->required();
  run->add_option("--out-dir", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
  run->add_option("--tolerance-override", tol, "convergence tolerance override")
      ->each([&](const std::string&) { tol_set = true; });
  run->add_option("--threads", threads, "worker threads (or env QTHERMO_THREADS)");

  auto* validate = app.add_subcommand("validate", "schema-check a config without running");
  validate->add_option("config", config, "scenario config file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return qthermo::cli::validate_scenario(config);

  qthermo::cli::RunOptions opts;
  opts.config_path = config;
  opts.out_dir_override = out_dir;
  if (seed_set) opts.seed_override = seed;
  if (tol_set) opts.tolerance_override = tol;
  opts.threads = threads;
  return qthermo::cli::run_scenario(opts);
}
