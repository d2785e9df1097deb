#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eigsgd/config.hpp"
#include "eigsgd/csv.hpp"
#include "eigsgd/problem.hpp"
#include "eigsgd/solvers.hpp"

namespace eigsgd {

/// Name of the environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "EIGSGD_OUTPUT_DIR";

/// Everything a config determines before any iteration runs.
struct PreparedExperiment {
  SyntheticProblem problem;
  ProblemConstants constants;
  Vector x0;
};

PreparedExperiment prepare(const ExperimentConfig& cfg);

/// Schedule checks against the problem constants, as human-readable warnings.
std::vector<std::string> config_diagnostics(const ExperimentConfig& cfg, const ProblemConstants& c);

/// Columns: iter, comp_l..., comp_sq_l..., norm_sq, se_comp_l..., se_comp_sq_l..., se_norm_sq.
CsvTable ensemble_table(const ExperimentConfig& cfg, const EnsembleSummary& s);

/// Columns: iter, then per probe pred_mean_l, and where the method and
/// schedule provide them bound_mean_l, bound_sq_l, closed_sq_l and
/// pred_mean_gamma1_l. Empty columns list when nothing applies.
CsvTable theory_table(const ExperimentConfig& cfg, const PreparedExperiment& prep,
                      const std::vector<std::int64_t>& iters);

/// matplotlib script overlaying |measured| / |initial| against predictions
/// per probe, plus ||x_k - x*||^2 / ||x_0 - x*||^2, on log-log axes.
std::string plot_script(const ExperimentConfig& cfg, const std::string& ensemble_file,
                        const std::optional<std::string>& theory_file);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // beats the environment and the config
  unsigned threads = 0;                             // 0 = hardware concurrency
};

struct ArtifactBundle {
  std::filesystem::path directory;
  std::filesystem::path ensemble_csv;
  std::optional<std::filesystem::path> theory_csv;
  std::optional<std::filesystem::path> plot_script;
  std::filesystem::path manifest;
  std::vector<std::string> warnings;
  std::optional<EnsembleSummary> summary;  // absent when the run diverged
  std::optional<std::string> divergence;
};

/// Resolution order: options.output_dir, then $EIGSGD_OUTPUT_DIR, then cfg.output_dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& options);

/// Runs the ensemble and writes all artifacts once aggregation is done. A
/// divergence is recorded in the manifest and the bundle instead of thrown;
/// no CSVs are written in that case. Filesystem failures throw.
ArtifactBundle run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// 64-bit FNV-1a of the serialized config, as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

}  // namespace eigsgd
