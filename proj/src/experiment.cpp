#include "eigsgd/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <variant>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "eigsgd/rate_bounds.hpp"
#include "eigsgd/theory.hpp"

#ifndef EIGSGD_VERSION
#define EIGSGD_VERSION "unknown"
#endif

namespace eigsgd {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string schedule_text(const ExperimentConfig& cfg) {
  return cfg.schedule ? cfg.schedule->describe() : std::string("none");
}

std::vector<std::pair<std::string, std::string>> common_metadata(const ExperimentConfig& cfg) {
  return {
      {"experiment", cfg.name},
      {"method", to_string(cfg.method)},
      {"schedule", schedule_text(cfg)},
      {"problem", fmt::format("{}x{} sigma in [{}, {}] {} {}", cfg.problem.rows, cfg.problem.cols,
                              format_double(cfg.problem.sigma_min), format_double(cfg.problem.sigma_max),
                              to_string(cfg.problem.spacing),
                              cfg.consistency.consistent
                                  ? std::string("consistent")
                                  : "inconsistent noise " + format_double(cfg.consistency.noise_level))},
      {"matrix_seed", std::to_string(cfg.problem.seed)},
      {"data_seed", std::to_string(cfg.data_seed)},
      {"x0_seed", std::to_string(cfg.x0_seed)},
      {"base_seed", std::to_string(cfg.plan.base_seed)},
      {"repetitions", std::to_string(cfg.plan.repetitions)},
  };
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::system_error(errno, std::generic_category(), "write failed for " + path.string());
}

// Columns of the theory table that apply to one probe, filled at every recorded iteration.
struct TheoryColumns {
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  void add(std::string name, std::vector<double> values) { cols.emplace_back(std::move(name), std::move(values)); }
};

template <class F>
std::vector<double> per_iter(const std::vector<std::int64_t>& iters, F f) {
  std::vector<double> out;
  out.reserve(iters.size());
  for (auto t : iters) out.push_back(f(t));
  return out;
}

}  // namespace

PreparedExperiment prepare(const ExperimentConfig& cfg) {
  PreparedExperiment prep;
  prep.problem = build_problem(cfg.problem, cfg.consistency, cfg.data_seed);
  prep.constants = compute_constants(prep.problem);
  prep.x0 = initial_point(prep.problem, cfg.x0_radius, cfg.x0_seed);
  return prep;
}

std::vector<std::string> config_diagnostics(const ExperimentConfig& cfg, const ProblemConstants& c) {
  std::vector<std::string> out;
  if (cfg.schedule) {
    for (const auto& d : validate(*cfg.schedule, c, cfg.iters)) {
      out.push_back(fmt::format("{} [{}] (iterations {}..{})", d.message, to_string(d.code), d.first_k, d.last_k));
    }
  }
  if (cfg.method == Method::kaczmarz && !cfg.consistency.consistent)
    out.emplace_back("the Kaczmarz mean prediction assumes a consistent problem; no theory curve is emitted");
  if (cfg.method == Method::gd && cfg.plan.repetitions > 1)
    out.emplace_back("gradient descent is deterministic; every repetition is identical");
  return out;
}

CsvTable ensemble_table(const ExperimentConfig& cfg, const EnsembleSummary& s) {
  CsvTable t;
  t.metadata = common_metadata(cfg);
  t.metadata.emplace_back("problem_digest", hex(s.meta.problem_digest));
  t.metadata.emplace_back("kind", "ensemble");

  t.columns.push_back("iter");
  for (Index l : s.probes) t.columns.push_back(fmt::format("comp_{}", l));
  for (Index l : s.probes) t.columns.push_back(fmt::format("comp_sq_{}", l));
  t.columns.push_back("norm_sq");
  for (Index l : s.probes) t.columns.push_back(fmt::format("se_comp_{}", l));
  for (Index l : s.probes) t.columns.push_back(fmt::format("se_comp_sq_{}", l));
  t.columns.push_back("se_norm_sq");

  const std::size_t np = s.probes.size();
  for (std::size_t r = 0; r < s.iters.size(); ++r) {
    std::vector<double> row;
    row.reserve(t.columns.size());
    row.push_back(static_cast<double>(s.iters[r]));
    for (std::size_t j = 0; j < np; ++j) row.push_back(s.mean_comp[j][r]);
    for (std::size_t j = 0; j < np; ++j) row.push_back(s.mean_comp_sq[j][r]);
    row.push_back(s.mean_norm_sq[r]);
    for (std::size_t j = 0; j < np; ++j) row.push_back(s.se_comp[j][r]);
    for (std::size_t j = 0; j < np; ++j) row.push_back(s.se_comp_sq[j][r]);
    row.push_back(s.se_norm_sq[r]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable theory_table(const ExperimentConfig& cfg, const PreparedExperiment& prep,
                      const std::vector<std::int64_t>& iters) {
  const auto& p = prep.problem;
  const auto& c = prep.constants;
  const double err0_sq = (prep.x0 - p.x_star).squaredNorm();

  CsvTable t;
  t.metadata = common_metadata(cfg);
  t.metadata.emplace_back("problem_digest", hex(digest(p)));
  t.metadata.emplace_back("kind", "theory");

  TheoryColumns all;
  for (Index l : cfg.probes) {
    const double sigma_sq = p.sigma[l - 1] * p.sigma[l - 1];
    const double c0 = component(p, prep.x0, l);

    if (cfg.method == Method::kaczmarz) {
      if (!p.consistent) continue;
      all.add(fmt::format("pred_mean_{}", l),
              per_iter(iters, [&](std::int64_t k) { return kaczmarz_expected_component(p, l, prep.x0, k); }));
      continue;
    }

    const StepSchedule& s = *cfg.schedule;
    auto pred = mean_factors(s, sigma_sq, iters);
    for (double& v : pred) v *= c0;
    all.add(fmt::format("pred_mean_{}", l), std::move(pred));

    if (const auto* h = std::get_if<HarmonicStep>(&s.variant())) {
      all.add(fmt::format("bound_mean_{}", l), per_iter(iters, [&](std::int64_t k) {
                return mean_bound_harmonic(h->a, h->b, sigma_sq, c0, k);
              }));
    } else if (const auto* g = std::get_if<PolynomialStep>(&s.variant())) {
      all.add(fmt::format("bound_mean_{}", l), per_iter(iters, [&](std::int64_t k) {
                return mean_bound_polynomial(g->a, g->b, g->gamma, sigma_sq, c0, k);
              }));
    }

    if (cfg.method == Method::sgd) {
      all.add(fmt::format("bound_sq_{}", l), second_moment_curve(c, s, sigma_sq, c0 * c0, err0_sq, iters));

      // Closed forms bound the iterate after k steps through horizon n = k - 1.
      std::optional<std::vector<double>> closed;
      try {
        if (const auto* f = std::get_if<FixedStep>(&s.variant())) {
          if (p.consistent)
            closed = per_iter(iters, [&](std::int64_t k) {
              return k == 0 ? err0_sq : second_moment_bound_fixed(p, c, f->alpha, prep.x0, k - 1).value;
            });
        } else if (const auto* h = std::get_if<HarmonicStep>(&s.variant())) {
          closed = per_iter(iters, [&](std::int64_t k) {
            return k == 0 ? c0 * c0 : rate_bounds_harmonic(c, h->a, h->b, sigma_sq, k - 1).second_moment(c0 * c0, err0_sq);
          });
        } else if (const auto* g = std::get_if<PolynomialStep>(&s.variant())) {
          closed = per_iter(iters, [&](std::int64_t k) {
            return k == 0 ? c0 * c0
                          : rate_bounds_polynomial(c, g->a, g->b, g->gamma, sigma_sq, k - 1)
                                .second_moment(c0 * c0, err0_sq);
          });
        }
      } catch (const UnsupportedRegime& e) {
        closed.reset();
        t.metadata.emplace_back(fmt::format("closed_sq_{}", l), std::string("omitted, ") + e.what());
      }
      if (closed) all.add(fmt::format("closed_sq_{}", l), std::move(*closed));
    }

    if (const auto* g = std::get_if<PolynomialStep>(&s.variant())) {
      auto gamma1 = mean_factors(StepSchedule::harmonic(g->a, g->b), sigma_sq, iters);
      for (double& v : gamma1) v *= c0;
      all.add(fmt::format("pred_mean_gamma1_{}", l), std::move(gamma1));
    }
  }

  if (all.cols.empty()) return t;
  t.columns.push_back("iter");
  for (const auto& [name, values] : all.cols) t.columns.push_back(name);
  for (std::size_t r = 0; r < iters.size(); ++r) {
    std::vector<double> row;
    row.reserve(t.columns.size());
    row.push_back(static_cast<double>(iters[r]));
    for (const auto& [name, values] : all.cols) row.push_back(values[r]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string plot_script(const ExperimentConfig& cfg, const std::string& ensemble_file,
                        const std::optional<std::string>& theory_file) {
  std::string probes;
  for (std::size_t j = 0; j < cfg.probes.size(); ++j) probes += (j ? ", " : "") + std::to_string(cfg.probes[j]);
  const bool polynomial = cfg.schedule && cfg.schedule->kind() == ScheduleKind::polynomial;

  return fmt::format(R"PY(#!/usr/bin/env python3
# Plots {name}: |component| / |initial component| per probe against its
# prediction, plus ||x_k - x*||^2 / ||x_0 - x*||^2, on log-log axes.
# Means can cross zero, so magnitudes are floored at 1e-16.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
ENSEMBLE = os.path.join(HERE, "{ensemble}")
THEORY = {theory}
PROBES = [{probes}]
FLOOR = 1e-16

STYLES = [
    ("tab:blue", "-", "o", "lightskyblue"),
    ("tab:green", "--", "+", "lightgreen"),
    ("tab:red", "-.", "*", "lightcoral"),
]


def load(path):
    with open(path) as fh:
        declared = None
        rows = []
        for line in fh:
            if line.startswith("#"):
                if line.startswith("# columns:"):
                    declared = line.split(":", 1)[1].strip().split(",")
                continue
            rows.append(line.strip().split(","))
    header, body = rows[0], rows[1:]
    if declared is not None and header != declared:
        sys.exit(f"{{path}}: header does not match declared columns")
    return {{name: [float(r[i]) for r in body] for i, name in enumerate(header)}}


def mag(values, scale):
    return [max(abs(v / scale), FLOOR) if scale != 0 else FLOOR for v in values]


data = load(ENSEMBLE)
theory = load(THEORY) if THEORY and os.path.exists(THEORY) else {{}}
it = [max(k, 1) for k in data["iter"]]

fig, ax = plt.subplots(figsize=(7, 5))
for j, ell in enumerate(PROBES):
    color, ls, marker, light = STYLES[j % len(STYLES)]
    comp = data[f"comp_{{ell}}"]
    c0 = comp[0]
    ax.plot(it, mag(comp, c0), color=color, linestyle=ls, marker=marker, markevery=max(1, len(it) // 20),
            label=f"l={{ell}} measured")
    pred = theory.get(f"pred_mean_{{ell}}")
    if pred is not None:
        ax.plot([max(k, 1) for k in theory["iter"]], mag(pred, c0), color=light, linestyle=ls,
                label=f"l={{ell}} prediction")
    if {polynomial} and j == 0 and f"pred_mean_gamma1_{{ell}}" in theory:
        ax.plot([max(k, 1) for k in theory["iter"]], mag(theory[f"pred_mean_gamma1_{{ell}}"], c0),
                color="plum", linestyle="-", label=f"l={{ell}} prediction, gamma=1")
norm = data["norm_sq"]
ax.plot(it, mag(norm, norm[0]), color="gold", linestyle="-", label="||x_k - x*||^2")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("iteration k")
ax.set_ylabel("relative magnitude")
ax.set_title("{name}")
ax.legend(fontsize="small")
fig.tight_layout()
out = os.path.join(HERE, "{name}.png")
fig.savefig(out, dpi=150)
print(out)
)PY",
                     fmt::arg("name", cfg.name), fmt::arg("ensemble", ensemble_file),
                     fmt::arg("theory", theory_file ? "os.path.join(HERE, \"" + *theory_file + "\")" : "None"),
                     fmt::arg("probes", probes), fmt::arg("polynomial", polynomial ? "True" : "False"));
}

fs::path resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& options) {
  if (options.output_dir) return *options.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return cfg.output_dir;
}

std::string config_digest(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return hex(h);
}

ArtifactBundle run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  if (cfg.method != Method::kaczmarz && !cfg.schedule)
    throw ConfigError("schedule.type", "required for " + to_string(cfg.method));

  const PreparedExperiment prep = prepare(cfg);
  ArtifactBundle bundle;
  bundle.directory = resolve_output_dir(cfg, options);
  bundle.warnings = config_diagnostics(cfg, prep.constants);

  json divergence = nullptr;
  try {
    bundle.summary = run_ensemble(prep.problem, cfg.method, cfg.schedule, prep.x0, cfg.iters, cfg.plan, cfg.probes,
                                  cfg.recording, options.threads);
  } catch (const DivergenceError& e) {
    bundle.divergence = e.what();
    divergence = {{"message", e.what()}, {"iteration", e.iteration()}, {"seed", e.seed()}};
  }

  fs::create_directories(bundle.directory);
  const fs::path dir = bundle.directory;
  const std::string ensemble_name = cfg.name + "_ensemble.csv";
  const std::string theory_name = cfg.name + "_theory.csv";
  const std::string script_name = cfg.name + "_plot.py";
  bundle.ensemble_csv = dir / ensemble_name;
  bundle.manifest = dir / (cfg.name + "_manifest.json");

  json files = json::object();
  if (bundle.summary) {
    write_file(bundle.ensemble_csv, to_csv_text(ensemble_table(cfg, *bundle.summary)));
    files["ensemble"] = ensemble_name;

    std::optional<std::string> theory_written;
    if (cfg.emit_theory) {
      const CsvTable theory = theory_table(cfg, prep, bundle.summary->iters);
      if (!theory.columns.empty()) {
        bundle.theory_csv = dir / theory_name;
        write_file(*bundle.theory_csv, to_csv_text(theory));
        theory_written = theory_name;
        files["theory"] = theory_name;
      }
    }
    if (cfg.emit_plot_script) {
      bundle.plot_script = dir / script_name;
      write_file(*bundle.plot_script, plot_script(cfg, ensemble_name, theory_written));
      files["plot_script"] = script_name;
    }
  }

  const auto now = std::chrono::system_clock::now();
  json seeds = {{"matrix_seed", cfg.problem.seed},
                {"data_seed", cfg.data_seed},
                {"x0_seed", cfg.x0_seed},
                {"base_seed", cfg.plan.base_seed}};
  json reps = json::array();
  for (std::int64_t r = 0; r < cfg.plan.repetitions; ++r) reps.push_back(cfg.plan.seed_for(r));
  seeds["repetition_seeds"] = std::move(reps);

  const auto& c = prep.constants;
  json manifest = {
      {"name", cfg.name},
      {"version", EIGSGD_VERSION},
      {"created_utc", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)))},
      {"config_digest", config_digest(cfg)},
      {"config", serialize_config(cfg)},
      {"problem_digest", hex(digest(prep.problem))},
      {"seeds", std::move(seeds)},
      {"constants",
       {{"rows", c.rows},
        {"L_tilde", c.L_tilde},
        {"cA", c.cA},
        {"frob_sq", c.frob_sq},
        {"sigma_noise_sq", c.sigma_noise_sq},
        {"sigma_min_sq", c.sigma_min_sq},
        {"sigma_max_sq", c.sigma_max_sq},
        {"F_star", c.F_star},
        {"consistent", c.consistent}}},
      {"files", std::move(files)},
      {"warnings", bundle.warnings},
      {"divergence", std::move(divergence)},
  };
  write_file(bundle.manifest, manifest.dump(2) + "\n");
  return bundle;
}

}  // namespace eigsgd
