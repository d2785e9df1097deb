#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigsgd/problem.hpp"
#include "eigsgd/schedule.hpp"
#include "eigsgd/solvers.hpp"

namespace eigsgd {

/// Configuration problem, tagged with the dotted key it concerns.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  std::string name = "experiment";

  SpectrumSpec problem;
  Consistency consistency;
  std::uint64_t data_seed = 0;

  Method method = Method::sgd;
  std::optional<StepSchedule> schedule;  // absent for Kaczmarz

  double x0_radius = 1.0;
  std::uint64_t x0_seed = 0;
  std::int64_t iters = 1;
  std::vector<Index> probes;
  RepetitionPlan plan;
  Recording recording;

  std::filesystem::path output_dir = "out";
  bool emit_theory = true;
  bool emit_plot_script = true;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the INI-style document:
///
///   [experiment]  name
///   [problem]     rows cols sigma_min sigma_max spacing matrix_seed data_seed
///                 consistency (consistent|inconsistent) noise_level
///   [method]      name (gd|sgd|kaczmarz)
///   [schedule]    type (fixed|harmonic|polynomial) alpha | a b [gamma]
///   [run]         iters probes repetitions base_seed x0_radius x0_seed
///                 recording (all|geometric) points_per_decade
///   [output]      dir emit_theory emit_plot_script
///
/// Required: problem.rows/cols/sigma_min/sigma_max, method.name, run.iters,
/// run.probes, and a schedule unless the method is kaczmarz. Everything else
/// has a default. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace eigsgd
