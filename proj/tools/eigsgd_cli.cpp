// Command-line harness: run configs and figure presets, validate configs,
// dump generated problems and measure log-log slope changes in CSV series.
//
// Exit codes: 0 success, 1 config error, 2 divergence, 3 I/O error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "eigsgd/config.hpp"
#include "eigsgd/csv.hpp"
#include "eigsgd/experiment.hpp"
#include "eigsgd/phase.hpp"
#include "eigsgd/presets.hpp"

namespace fs = std::filesystem;
using namespace eigsgd;

namespace {

enum Exit { kOk = 0, kConfig = 1, kDiverged = 2, kIo = 3 };

bool is_preset(const std::string& name) {
  for (const auto& p : preset_names())
    if (p == name) return true;
  return false;
}

// A path that exists is a config file; otherwise a preset name is accepted.
ExperimentConfig resolve(const std::string& target, const std::optional<std::string>& scale) {
  if (!fs::exists(target) && is_preset(target)) return preset(target, parse_scale(scale.value_or("desk")));
  if (scale) fmt::print(std::cerr, "warning: --scale applies to presets only; ignored for {}\n", target);
  return load_config(target);
}

int report_run(const ArtifactBundle& b) {
  for (const auto& w : b.warnings) fmt::print(std::cerr, "warning: {}\n", w);
  if (b.divergence) {
    fmt::print(std::cerr, "error: {}\nmanifest: {}\n", *b.divergence, b.manifest.string());
    return kDiverged;
  }
  fmt::print("ensemble: {}\n", b.ensemble_csv.string());
  if (b.theory_csv) fmt::print("theory:   {}\n", b.theory_csv->string());
  if (b.plot_script) fmt::print("plot:     {}\n", b.plot_script->string());
  fmt::print("manifest: {}\n", b.manifest.string());
  return kOk;
}

RunOptions run_options(const std::optional<std::string>& out, unsigned threads) {
  RunOptions o;
  if (out) o.output_dir = fs::path(*out);
  o.threads = threads;
  return o;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const DivergenceError& e) {
    fmt::print(std::cerr, "diverged: {}\n", e.what());
    return kDiverged;
  } catch (const fs::filesystem_error& e) {
    fmt::print(std::cerr, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const std::system_error& e) {
    fmt::print(std::cerr, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    // Remaining library errors come from invalid parameters.
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigencomponent convergence experiments for SGD, GD and randomized Kaczmarz on least squares"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(EIGSGD_VERSION));

  std::string target;
  std::optional<std::string> scale;
  std::optional<std::string> out;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a config file (or a preset name) and write its artifacts");
  run->add_option("config", target, "Config file, or fig1..fig8")->required();
  run->add_option("--scale", scale, "desk or paper, for presets")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--out", out, "Output directory (overrides $EIGSGD_OUTPUT_DIR and the config)");
  run->add_option("--threads", threads, "Worker threads for repetitions; 0 uses all cores");

  std::string fig;
  bool print_config = false;
  std::optional<std::int64_t> repetitions;
  auto* pre = app.add_subcommand("preset", "Run a figure preset");
  pre->add_option("name", fig, "fig1..fig8")->required()->check(CLI::IsMember(preset_names()));
  pre->add_option("--scale", scale, "desk (default) or paper")->check(CLI::IsMember({"desk", "paper"}));
  pre->add_option("--out", out, "Output directory");
  pre->add_option("--repetitions", repetitions, "Override the preset's repetition count")
      ->check(CLI::PositiveNumber);
  pre->add_option("--threads", threads, "Worker threads for repetitions; 0 uses all cores");
  pre->add_flag("--print-config", print_config, "Print the expanded config and exit");

  auto* val = app.add_subcommand("validate", "Parse a config and report schedule diagnostics");
  val->add_option("config", target, "Config file, or fig1..fig8")->required();
  val->add_option("--scale", scale, "desk or paper, for presets")->check(CLI::IsMember({"desk", "paper"}));

  auto* dump = app.add_subcommand("dump-problem", "Write A, b, sigma and x_star as CSV");
  dump->add_option("config", target, "Config file, or fig1..fig8")->required();
  dump->add_option("--scale", scale, "desk or paper, for presets")->check(CLI::IsMember({"desk", "paper"}));
  dump->add_option("--out", out, "Output directory (default <output dir>/problem)");

  std::string csv_path;
  std::string early_text, late_text;
  std::string column = "norm_sq";
  double margin = 0.1;
  auto* phase = app.add_subcommand("phase", "Compare log-log slopes of a CSV column on two iteration windows");
  phase->add_option("csv", csv_path, "CSV written by run or preset")->required();
  phase->add_option("--early", early_text, "Early window A:B")->required();
  phase->add_option("--late", late_text, "Late window C:D")->required();
  phase->add_option("--column", column, "Column to fit; absolute values are used")->capture_default_str();
  phase->add_option("--margin", margin, "Slope increase that counts as a transition")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) {
    return guarded([&] { return report_run(run_experiment(resolve(target, scale), run_options(out, threads))); });
  }

  if (*pre) {
    return guarded([&] {
      auto cfg = preset(fig, parse_scale(scale.value_or("desk")));
      if (repetitions) cfg.plan.repetitions = *repetitions;
      if (print_config) {
        fmt::print("{}", serialize_config(cfg));
        return int{kOk};
      }
      return report_run(run_experiment(cfg, run_options(out, threads)));
    });
  }

  if (*val) {
    return guarded([&] {
      const auto cfg = resolve(target, scale);
      const auto prep = prepare(cfg);
      const auto warnings = config_diagnostics(cfg, prep.constants);
      for (const auto& w : warnings) fmt::print("warning: {}\n", w);
      const auto& c = prep.constants;
      fmt::print("ok: {} ({}x{}, M*L_tilde = {:.6g}, cA = {:.6g}, F* = {:.6g}), {} warning(s)\n", cfg.name,
                 cfg.problem.rows, cfg.problem.cols, static_cast<double>(c.rows) * c.L_tilde, c.cA, c.F_star,
                 warnings.size());
      return int{kOk};
    });
  }

  if (*dump) {
    return guarded([&] {
      const auto cfg = resolve(target, scale);
      const fs::path dir = out ? fs::path(*out) : resolve_output_dir(cfg, {}) / "problem";
      write_problem_csv(prepare(cfg).problem, dir);
      fmt::print("problem written to {}\n", dir.string());
      return int{kOk};
    });
  }

  if (*phase) {
    return guarded([&] {
      const CsvTable table = read_csv(csv_path);
      std::vector<double> iters = table.column_values("iter");
      std::vector<double> values = table.column_values(column);
      for (double& v : values) v = std::abs(v);
      const auto r = detect_phase_transition(iters, values, parse_window(early_text), parse_window(late_text), margin);
      fmt::print("column:     {}\n", column);
      fmt::print("slope_early {:.6f} ({} points)\n", r.slope_early, r.early_points);
      fmt::print("slope_late  {:.6f} ({} points)\n", r.slope_late, r.late_points);
      fmt::print("transition  {} (margin {})\n", r.transition_detected ? "yes" : "no", r.margin);
      return int{kOk};
    });
  }
  return kConfig;
}
