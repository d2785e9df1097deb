#include "eigsgd/phase.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace eigsgd {
namespace {

struct Fit {
  double slope = 0.0;
  std::size_t points = 0;
};

Fit fit_window(std::span<const double> iters, std::span<const double> values, Window w, const char* label) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < iters.size(); ++i) {
    if (iters[i] < w.lo || iters[i] > w.hi) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument(fmt::format(
          "{} window has a nonpositive value {} at iteration {}; pass second moments or absolute means", label,
          values[i], iters[i]));
    xs.push_back(std::log(iters[i]));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 2)
    throw std::invalid_argument(fmt::format("{} window [{}, {}] holds {} point(s); need at least 2", label, w.lo,
                                            w.hi, xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument(fmt::format("{} window has no spread in iteration", label));
  return {sxy / sxx, xs.size()};
}

}  // namespace

Window parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("window must look like A:B, got '" + text + "'");
  Window w;
  try {
    std::size_t used = 0;
    const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
    w.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument("");
    w.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("window must look like A:B with numeric bounds, got '" + text + "'");
  }
  if (!(w.lo > 0.0 && w.hi > w.lo)) throw std::invalid_argument("window needs 0 < A < B, got '" + text + "'");
  return w;
}

PhaseReport detect_phase_transition(std::span<const double> iters, std::span<const double> values, Window early,
                                    Window late, double margin) {
  if (iters.size() != values.size()) throw std::invalid_argument("iters and values differ in length");
  if (!(early.lo > 0.0 && early.hi > early.lo && late.hi > late.lo))
    throw std::invalid_argument("windows must be positive, nonempty intervals");
  if (!(early.hi < late.lo)) throw std::invalid_argument("early window must end before the late window starts");

  const Fit e = fit_window(iters, values, early, "early");
  const Fit l = fit_window(iters, values, late, "late");
  PhaseReport r;
  r.slope_early = e.slope;
  r.slope_late = l.slope;
  r.early_points = e.points;
  r.late_points = l.points;
  r.margin = margin;
  r.transition_detected = r.slope_late > r.slope_early + margin;
  return r;
}

}  // namespace eigsgd
