// pptaxis: command-line driver for the predator-prey taxis simulator.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pptaxis/runner.hpp"

using namespace pptaxis;

int main(int argc, char** argv) {
  CLI::App app{"Predator-prey system with prey-taxis and predator-taxis"};
  app.require_subcommand(1);
  app.footer(config_reference());

  std::string config_path, out_dir, solver, chi_list, xi_list;
  std::size_t jobs = 1;
  double delta = 0.0;

  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write norms, snapshots and reports");
  simulate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--solver", solver, "Override solver.kind")->check(CLI::IsMember({"imex", "picard"}));
  simulate->add_option("--jobs", jobs, "Worker cap (a single run uses one thread)")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a (chi, xi) grid and write sweep.csv");
  sweep->add_option("--config", config_path, "Base config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--chi", chi_list, "Comma-separated chi values")->required();
  sweep->add_option("--xi", xi_list, "Comma-separated xi values")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);

  auto* constants = app.add_subcommand("check-constants", "Print derived constants and taxis admissibility");
  constants->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  auto* twin = app.add_subcommand("twin-test", "Twin-run energy separation test");
  twin->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  twin->add_option("--delta", delta, "Perturbation size (>= 0)")->required()->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    RunSpec spec = load_config(config_path);
    if (!solver.empty()) spec.solver.kind = solver == "picard" ? SolverChoice::picard : SolverChoice::imex;

    if (*simulate) {
      const RunOutcome o = run_main(spec, out_dir);
      std::cout << "outcome: " << o.outcome << "\n";
      if (!o.message.empty()) std::cerr << o.message << "\n";
      return o.exit_code;
    }
    if (*sweep) {
      SweepSpec s;
      s.base = spec;
      s.chi_values = parse_number_list(chi_list, "--chi");
      s.xi_values = parse_number_list(xi_list, "--xi");
      s.jobs = jobs;
      std::cout << sweep_csv(run_sweep(s, out_dir));
      return kExitOk;
    }
    if (*constants) {
      print_constants(spec, std::cout);
      return kExitOk;
    }
    if (*twin) return run_twin_test(spec, delta, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
