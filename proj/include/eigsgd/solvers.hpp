#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigsgd/problem.hpp"
#include "eigsgd/schedule.hpp"

namespace eigsgd {

enum class Method { gd, sgd, kaczmarz };

std::string to_string(Method m);
Method parse_method(const std::string& text);

/// Which iterations a trajectory records. Iteration 0 and the final iterate are
/// always included.
struct Recording {
  enum class Kind { all, geometric };
  Kind kind = Kind::geometric;
  int points_per_decade = 64;

  static Recording every() { return {Kind::all, 0}; }
  static Recording geometric(int points_per_decade = 64) { return {Kind::geometric, points_per_decade}; }

  /// Ascending, unique iteration indices in [0, iters].
  std::vector<std::int64_t> iterations(std::int64_t iters) const;

  bool operator==(const Recording&) const = default;
};

struct TraceMetadata {
  Method method = Method::sgd;
  std::optional<StepSchedule> schedule;
  std::uint64_t seed = 0;
  std::uint64_t problem_digest = 0;
};

/// Signed eigencomponents and squared error norm at recorded iterations.
struct Trace {
  std::vector<std::int64_t> iters;
  std::vector<Index> probes;                   // 1-based
  std::vector<std::vector<double>> components;  // [probe][record]
  std::vector<double> norm_sq;                  // [record]
  TraceMetadata meta;
};

struct RepetitionPlan {
  std::int64_t repetitions = 1;
  std::uint64_t base_seed = 0;

  std::uint64_t seed_for(std::int64_t repetition) const;

  bool operator==(const RepetitionPlan&) const = default;
};

/// Across-repetition statistics at each recorded iteration. Standard errors are
/// sample standard deviations over sqrt(repetitions); zero for one repetition.
struct EnsembleSummary {
  std::vector<std::int64_t> iters;
  std::vector<Index> probes;
  std::vector<std::vector<double>> mean_comp;  // [probe][record]
  std::vector<std::vector<double>> se_comp;
  std::vector<std::vector<double>> mean_comp_sq;
  std::vector<std::vector<double>> se_comp_sq;
  std::vector<double> mean_norm_sq;
  std::vector<double> se_norm_sq;
  std::int64_t repetitions = 0;
  TraceMetadata meta;  // seed is the plan's base seed
};

/// x - alpha (A^T A x - A^T b)
Vector gd_step(const SyntheticProblem& p, const Vector& x, double alpha);

/// x + alpha M (b_i - <a_i, x>) a_i with row i in 1..M.
Vector sgd_step(const SyntheticProblem& p, const Vector& x, double alpha, Index i);

/// Projection onto <a_i, x> = b_i, row i in 1..M.
Vector kaczmarz_step(const SyntheticProblem& p, const Vector& x, Index i);

/// Squared-row-norm weights ||a_i||^2 / ||A||_F^2, cumulated; used for sampling.
std::vector<double> kaczmarz_cumulative_weights(const SyntheticProblem& p);

/// Row (1-based) drawn at iteration k. SGD samples uniformly; Kaczmarz by squared
/// row norm. A pure function of (seed, k).
Index sampled_row(Method method, const std::vector<double>& cumulative, Index rows, std::uint64_t seed,
                  std::int64_t k);

/// Runs `iters` updates from x0. Throws DivergenceError when an iterate is not
/// finite or ||x_k - x*||^2 exceeds 1e12 times its initial value.
Trace run_trajectory(const SyntheticProblem& p, Method method, const std::optional<StepSchedule>& schedule,
                     const Vector& x0, std::int64_t iters, std::uint64_t seed, const std::vector<Index>& probes,
                     const Recording& recording);

/// Repetition r uses plan.seed_for(r); repetitions may run on `threads` workers
/// (0 = hardware concurrency) and are reduced in index order. If any repetition
/// diverges, throws DivergenceError naming every failing seed.
EnsembleSummary run_ensemble(const SyntheticProblem& p, Method method, const std::optional<StepSchedule>& schedule,
                             const Vector& x0, std::int64_t iters, const RepetitionPlan& plan,
                             const std::vector<Index>& probes, const Recording& recording, unsigned threads = 0);

}  // namespace eigsgd
