// Command-line runner for the named experiments.
#include <omp.h>

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "rpsim/errors.hpp"
#include "rpsim/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radical-pair spin dynamics experiments"};
  app.require_subcommand(0, 1);

  std::string experiment, config_path, scale = "ci", out;
  std::uint64_t seed = 0;
  int workers = 0;
  bool check = false;
  app.add_option("--experiment,-e", experiment, "named experiment (see 'list')");
  app.add_option("--config,-c", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--workers,-j", workers, "worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--scale", scale, "ci, desk or full")
      ->check(CLI::IsMember({"ci", "desk", "full"}));
  app.add_option("--out,-o", out, "output directory");
  app.add_flag("--check", check, "run invariant checks; exit 2 on failure");
  auto* list = app.add_subcommand("list", "print the experiment table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    std::cout << std::left << std::setw(15) << "name" << std::setw(28) << "figure"
              << std::setw(8) << "class" << "description\n";
    for (const auto& e : rpsim::list_experiments())
      std::cout << std::setw(15) << e.name << std::setw(28) << e.figure << std::setw(8)
                << e.runtime_class << e.description << "\n";
    return 0;
  }

  try {
    rpsim::ExperimentConfig config;
    if (!config_path.empty()) {
      config = rpsim::load_config(config_path);
      if (!experiment.empty() && experiment != config.experiment)
        throw rpsim::ConfigError(config_path + ": experiment '" + config.experiment +
                                 "' conflicts with --experiment " + experiment);
    } else if (!experiment.empty()) {
      config = rpsim::default_config(experiment, rpsim::scale_from_name(scale));
    } else {
      std::cerr << "nothing to do: pass --experiment, --config or 'list'\n";
      return 1;
    }
    if (seed_opt->count() > 0) config.seed = seed;
    if (!out.empty()) config.out_dir = out;
    if (workers > 0) omp_set_num_threads(workers);

    const auto result = rpsim::run_experiment(config, check);
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    if (check && !result.passed()) {
      for (const auto& m : result.check_failures) std::cerr << "check failed: " << m << "\n";
      return 2;
    }
    return 0;
  } catch (const rpsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rpsim::InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 2;
  } catch (const rpsim::ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return 3;
  }
}
