// Scenario runner. Exit status: 0 pass, 1 audit failure, 2 config or solver error.
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "magmeso/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mesoscopic thermo-magnetic simulation runner"};
  app.require_subcommand(1);
  std::string config_path, outdir = "out";
  std::optional<unsigned> seed;
  std::optional<double> tau, kappa;
  std::optional<int> steps;

  const char* modes[] = {"evolve", "static", "kappa_sweep", "tau_study", "hysteresis", "curie_sweep"};
  for (const char* m : modes) {
    CLI::App* sub = app.add_subcommand(m, std::string("run the ") + m + " scenario");
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", outdir, "output directory");
    sub->add_option("--seed", seed, "seed for audit sampling");
    sub->add_option("--tau", tau, "override schedule.tau");
    sub->add_option("--kappa", kappa, "override material.kappa");
    sub->add_option("--steps", steps, "override the number of steps (T_end = steps * tau)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    magmeso::Config cfg = magmeso::load_config(config_path);
    if (seed) {
      cfg.run.seed = *seed;
      cfg.inc.audit_seed = *seed;
    }
    if (tau) {
      cfg.schedule.tau = *tau;
      // Keep the horizon, rounded to a whole number of steps.
      cfg.schedule.T_end = std::max(1L, std::lround(cfg.schedule.T_end / *tau)) * *tau;
    }
    if (kappa) cfg.mat.kappa_pen = *kappa;
    if (steps) cfg.schedule.T_end = *steps * cfg.schedule.tau;
    magmeso::validate_config(cfg);

    const std::string mode = app.get_subcommands().front()->get_name();
    if (mode == "evolve") return magmeso::run_evolve(cfg, outdir);
    if (mode == "static") return magmeso::run_static(cfg, outdir);
    if (mode == "kappa_sweep") return magmeso::run_kappa_sweep(cfg, outdir);
    if (mode == "tau_study") return magmeso::run_tau_study(cfg, outdir);
    if (mode == "hysteresis") return magmeso::run_hysteresis(cfg, outdir);
    return magmeso::run_curie_sweep(cfg, outdir);
  } catch (const magmeso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const magmeso::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
