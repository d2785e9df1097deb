#include "eigsgd/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "eigsgd/rng.hpp"

namespace eigsgd {
namespace {

constexpr double kDivergenceFactor = 1e12;

void check_row(const SyntheticProblem& p, Index i) {
  if (i < 1 || i > p.rows()) throw DimensionError(fmt::format("row index {} outside 1..{}", i, p.rows()));
}

void check_x(const SyntheticProblem& p, const Vector& x) {
  if (x.size() != p.cols()) throw DimensionError(fmt::format("x has length {}, expected {}", x.size(), p.cols()));
}

void check_probes(const SyntheticProblem& p, const std::vector<Index>& probes) {
  for (Index l : probes)
    if (l < 1 || l > p.cols()) throw DimensionError(fmt::format("probe index {} outside 1..{}", l, p.cols()));
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class Get>
Moments moments(std::size_t n, Get get) {
  // Accumulate deviations from the first sample so identical samples reduce exactly.
  Moments m;
  const double first = get(0);
  double shift = 0.0;
  for (std::size_t r = 1; r < n; ++r) shift += get(r) - first;
  m.mean = first + shift / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = get(r) - m.mean;
      ss += d * d;
    }
    m.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return m;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::gd: return "gd";
    case Method::sgd: return "sgd";
    case Method::kaczmarz: return "kaczmarz";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "gd") return Method::gd;
  if (text == "sgd") return Method::sgd;
  if (text == "kaczmarz") return Method::kaczmarz;
  throw std::invalid_argument("method must be one of gd, sgd, kaczmarz; got '" + text + "'");
}

std::vector<std::int64_t> Recording::iterations(std::int64_t iters) const {
  std::vector<std::int64_t> out;
  if (iters < 0) return out;
  if (kind == Kind::all) {
    out.resize(static_cast<std::size_t>(iters) + 1);
    for (std::int64_t k = 0; k <= iters; ++k) out[static_cast<std::size_t>(k)] = k;
    return out;
  }
  if (points_per_decade < 1) throw std::invalid_argument("points_per_decade must be >= 1");
  out.push_back(0);
  for (int j = 0;; ++j) {
    const auto k = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(j) / points_per_decade)));
    if (k > iters) break;
    if (k != out.back()) out.push_back(k);
  }
  if (out.back() != iters) out.push_back(iters);
  return out;
}

std::uint64_t RepetitionPlan::seed_for(std::int64_t repetition) const {
  return rng::derive_seed(base_seed, static_cast<std::uint64_t>(repetition));
}

Vector gd_step(const SyntheticProblem& p, const Vector& x, double alpha) {
  check_x(p, x);
  return x - alpha * (p.A.transpose() * (p.A * x - p.b));
}

Vector sgd_step(const SyntheticProblem& p, const Vector& x, double alpha, Index i) {
  check_x(p, x);
  check_row(p, i);
  const auto row = p.A.row(i - 1);
  const double residual = p.b[i - 1] - row.dot(x);
  return x + (alpha * static_cast<double>(p.rows()) * residual) * row.transpose();
}

Vector kaczmarz_step(const SyntheticProblem& p, const Vector& x, Index i) {
  check_x(p, x);
  check_row(p, i);
  const auto row = p.A.row(i - 1);
  const double norm_sq = row.squaredNorm();
  if (!(norm_sq > 0.0)) throw std::invalid_argument(fmt::format("row {} of A is zero; cannot project", i));
  return x + ((p.b[i - 1] - row.dot(x)) / norm_sq) * row.transpose();
}

std::vector<double> kaczmarz_cumulative_weights(const SyntheticProblem& p) {
  std::vector<double> cumulative(static_cast<std::size_t>(p.rows()));
  double total = 0.0;
  for (Index i = 0; i < p.rows(); ++i) {
    total += p.A.row(i).squaredNorm();
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  return cumulative;
}

Index sampled_row(Method method, const std::vector<double>& cumulative, Index rows, std::uint64_t seed,
                  std::int64_t k) {
  const auto counter = static_cast<std::uint64_t>(k);
  if (method == Method::kaczmarz) {
    const double target = rng::unit_interval(seed, counter) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto idx = std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(rows) - 1);
    return static_cast<Index>(idx) + 1;
  }
  return static_cast<Index>(rng::uniform_index(seed, counter, static_cast<std::size_t>(rows))) + 1;
}

Trace run_trajectory(const SyntheticProblem& p, Method method, const std::optional<StepSchedule>& schedule,
                     const Vector& x0, std::int64_t iters, std::uint64_t seed, const std::vector<Index>& probes,
                     const Recording& recording) {
  check_x(p, x0);
  check_probes(p, probes);
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (method != Method::kaczmarz && !schedule)
    throw std::invalid_argument(to_string(method) + " requires a step schedule");

  Trace t;
  t.iters = recording.iterations(iters);
  t.probes = probes;
  t.components.assign(probes.size(), std::vector<double>(t.iters.size()));
  t.norm_sq.resize(t.iters.size());
  t.meta = {method, method == Method::kaczmarz ? std::nullopt : schedule, seed, digest(p)};

  const Index m = p.rows();
  const double m_factor = static_cast<double>(m);
  const Vector row_sq = p.A.rowwise().squaredNorm();
  std::vector<double> cumulative;
  if (method == Method::kaczmarz) {
    cumulative = kaczmarz_cumulative_weights(p);
    if (!(row_sq.minCoeff() > 0.0)) throw std::invalid_argument("Kaczmarz requires every row of A to be nonzero");
  }

  Vector x = x0;
  Vector diff = x - p.x_star;
  const double initial_sq = diff.squaredNorm();
  const double limit = initial_sq > 0.0 ? kDivergenceFactor * initial_sq : HUGE_VAL;
  std::size_t next = 0;

  auto record = [&](std::size_t slot, double norm_sq) {
    for (std::size_t j = 0; j < probes.size(); ++j) t.components[j][slot] = diff.dot(p.direction(probes[j]));
    t.norm_sq[slot] = norm_sq;
  };

  record(next++, initial_sq);
  Vector grad(p.cols());
  for (std::int64_t k = 0; k < iters; ++k) {
    switch (method) {
      case Method::gd:
        grad.noalias() = p.A.transpose() * (p.A * x - p.b);
        x.noalias() -= schedule->step_at(k) * grad;
        break;
      case Method::sgd: {
        const Index i = sampled_row(method, cumulative, m, seed, k) - 1;
        const auto row = p.A.row(i);
        const double coeff = schedule->step_at(k) * m_factor * (p.b[i] - row.dot(x));
        x.noalias() += coeff * row.transpose();
        break;
      }
      case Method::kaczmarz: {
        const Index i = sampled_row(method, cumulative, m, seed, k) - 1;
        const auto row = p.A.row(i);
        x.noalias() += ((p.b[i] - row.dot(x)) / row_sq[i]) * row.transpose();
        break;
      }
    }
    diff.noalias() = x - p.x_star;
    const double norm_sq = diff.squaredNorm();
    if (!std::isfinite(norm_sq) || norm_sq > limit)
      throw DivergenceError(fmt::format("{} diverged at iteration {} (||x_k - x*||^2 = {:.3g}, seed {})",
                                        to_string(method), k + 1, norm_sq, seed),
                            k + 1, seed);
    if (next < t.iters.size() && t.iters[next] == k + 1) record(next++, norm_sq);
  }
  return t;
}

EnsembleSummary run_ensemble(const SyntheticProblem& p, Method method, const std::optional<StepSchedule>& schedule,
                             const Vector& x0, std::int64_t iters, const RepetitionPlan& plan,
                             const std::vector<Index>& probes, const Recording& recording, unsigned threads) {
  if (plan.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  check_x(p, x0);
  check_probes(p, probes);
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");
  const auto reps = static_cast<std::size_t>(plan.repetitions);

  std::vector<Trace> traces(reps);
  std::vector<std::int64_t> failed_at(reps, -1);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        traces[r] = run_trajectory(p, method, schedule, x0, iters, plan.seed_for(static_cast<std::int64_t>(r)),
                                   probes, recording);
      } catch (const DivergenceError& e) {
        failed_at[r] = e.iteration();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  std::vector<std::string> failures;
  std::int64_t first_iteration = -1;
  std::uint64_t first_seed = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (failed_at[r] < 0) continue;
    const auto seed = plan.seed_for(static_cast<std::int64_t>(r));
    if (first_iteration < 0) {
      first_iteration = failed_at[r];
      first_seed = seed;
    }
    failures.push_back(fmt::format("repetition {} (seed {}) at iteration {}", r, seed, failed_at[r]));
  }
  if (!failures.empty())
    throw DivergenceError(fmt::format("{} of {} repetitions diverged: {}", failures.size(), reps,
                                      fmt::join(failures, "; ")),
                          first_iteration, first_seed);

  EnsembleSummary s;
  s.iters = traces.front().iters;
  s.probes = probes;
  s.repetitions = plan.repetitions;
  s.meta = traces.front().meta;
  s.meta.seed = plan.base_seed;
  const std::size_t records = s.iters.size();
  const std::size_t np = probes.size();
  s.mean_comp.assign(np, std::vector<double>(records));
  s.se_comp = s.mean_comp_sq = s.se_comp_sq = s.mean_comp;
  s.mean_norm_sq.resize(records);
  s.se_norm_sq.resize(records);

  for (std::size_t t = 0; t < records; ++t) {
    for (std::size_t j = 0; j < np; ++j) {
      const auto c = moments(reps, [&](std::size_t r) { return traces[r].components[j][t]; });
      const auto c2 = moments(reps, [&](std::size_t r) {
        const double v = traces[r].components[j][t];
        return v * v;
      });
      s.mean_comp[j][t] = c.mean;
      s.se_comp[j][t] = c.se;
      s.mean_comp_sq[j][t] = c2.mean;
      s.se_comp_sq[j][t] = c2.se;
    }
    const auto n = moments(reps, [&](std::size_t r) { return traces[r].norm_sq[t]; });
    s.mean_norm_sq[t] = n.mean;
    s.se_norm_sq[t] = n.se;
  }
  return s;
}

}  // namespace eigsgd
