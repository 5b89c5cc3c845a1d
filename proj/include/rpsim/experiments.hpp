#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rpsim/pair_model.hpp"

namespace rpsim {

enum class Scale { ci, desk, full };
Scale scale_from_name(const std::string& name);
std::string scale_name(Scale s);

struct ExperimentConfig {
  std::string experiment;
  Scale scale = Scale::ci;
  std::string molecule;                 // name in the molecule directory or a path
  std::size_t truncate = 0;             // nuclei kept per radical, 0 keeps all
  std::vector<std::string> protocols;
  double k_per_s = 5.8e8;
  double tau_c_ns = 0.5;
  double tau_a_ns = 0.5;
  std::vector<double> fields_mT;
  std::vector<double> thetas_rad;
  std::vector<std::string> families;
  std::size_t n_samples = 0;
  std::vector<double> temperatures_K;
  double kappa0 = 1.0;
  std::uint64_t seed = 1;
  double tol = kDefaultTolerance;
  double field_step_mT = 0.01;
  std::string bath = "auto";            // auto | exact | sampled
  std::size_t bath_samples = 256;
  bool fixed_lab_perpendicular = false;
  std::string pulse_target = "both";    // both | electron1 | electron2
  std::filesystem::path out_dir = "out";
  std::string source;                   // config file path, for error messages

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Defaults of a named experiment at a scale.
ExperimentConfig default_config(const std::string& experiment, Scale scale = Scale::ci);

/// JSON config merged over the defaults of its experiment. Keys: experiment,
/// scale, molecule, truncate, protocols, k_per_s, tau_c_ns, tau_a_ns,
/// fields_mT, thetas_rad (arrays or {"from","to","n"}), families, n_samples,
/// temperatures_K, kappa0, seed, tol, field_step_mT, bath, bath_samples,
/// fixed_lab_perpendicular, pulse_target, out.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text, const std::string& source = "<json>");
std::string config_to_json(const ExperimentConfig& config);

struct ExperimentInfo {
  std::string name;
  std::string figure;
  std::string description;
  std::string runtime_class;  // CI | desk | long
};
const std::vector<ExperimentInfo>& list_experiments();

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> check_failures;
  bool passed() const { return check_failures.empty(); }
};

/// Run and write CSVs, the resolved config and a manifest into config.out_dir.
/// With `check`, invariant checks run as well and failures are collected.
ExperimentOutput run_experiment(const ExperimentConfig& config, bool check = false);

/// Radical pair and setup described by a config (molecule loaded and truncated).
RadicalPairSetup setup_from_config(const ExperimentConfig& config, const std::string& protocol);

}  // namespace rpsim
