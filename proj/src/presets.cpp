#include "eigsgd/presets.hpp"

#include <stdexcept>

namespace eigsgd {
namespace {

ExperimentConfig base(const std::string& name, Index rows, Index cols, double sigma_min) {
  ExperimentConfig c;
  c.name = name;
  c.problem.rows = rows;
  c.problem.cols = cols;
  c.problem.sigma_min = sigma_min;
  c.problem.sigma_max = 1.0;
  c.problem.spacing = Spacing::linear;
  c.problem.seed = 20240101;
  c.data_seed = 7;
  c.consistency = Consistency::exact();
  c.x0_radius = 1.0;
  c.x0_seed = 11;
  c.plan = {1, 1234};
  c.recording = Recording::geometric(64);
  c.output_dir = "out/" + name;
  return c;
}

// Small 30x20 instance shared by fig2/3/5/6/7.
ExperimentConfig small(const std::string& name, StepSchedule schedule, std::int64_t iters, bool consistent) {
  auto c = base(name, 30, 20, 0.1);
  c.method = Method::sgd;
  c.schedule = schedule;
  c.iters = iters;
  c.probes = {1, 10, 20};
  c.plan.repetitions = 20;
  if (!consistent) c.consistency = Consistency::noisy(kPresetNoiseLevel);
  return c;
}

// Large single-trajectory instance for fig4/fig8.
ExperimentConfig large(const std::string& name, Scale scale, Index paper_cols, StepSchedule schedule) {
  const bool desk = scale == Scale::desk;
  const Index rows = desk ? 1000 : 10000;
  const Index cols = desk ? 300 : paper_cols;
  auto c = base(name, rows, cols, 0.01);
  c.method = Method::sgd;
  c.schedule = schedule;
  c.iters = desk ? 100000 : 1000000;
  c.probes = {1, cols * 9 / 10, cols};
  c.plan.repetitions = 1;
  return c;
}

}  // namespace

std::string to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::desk;
  if (text == "paper") return Scale::paper;
  throw std::invalid_argument("scale must be desk or paper; got '" + text + "'");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
  return names;
}

ExperimentConfig preset(const std::string& name, Scale scale) {
  const auto harmonic = StepSchedule::harmonic(0.5, 20.0);
  const auto polynomial = StepSchedule::polynomial(0.2, 5.0, 0.8);

  if (name == "fig1") {
    auto c = base(name, 300, 150, 0.01);
    c.method = Method::kaczmarz;
    c.iters = 100000;
    c.probes = {1, 135, 150};
    return c;
  }
  if (name == "fig2") return small(name, harmonic, 10000, true);
  if (name == "fig3") return small(name, harmonic, 10000, false);
  if (name == "fig4") return large(name, scale, 3000, StepSchedule::harmonic(0.5, 150.0));
  if (name == "fig5") return small(name, polynomial, 10000, true);
  if (name == "fig6") return small(name, polynomial, 10000, false);
  if (name == "fig7") return small(name, polynomial, 1000000, true);
  if (name == "fig8") return large(name, scale, 2000, StepSchedule::polynomial(0.06, 50.0, 0.7));
  throw std::invalid_argument("unknown preset '" + name + "'; expected fig1..fig8");
}

}  // namespace eigsgd
