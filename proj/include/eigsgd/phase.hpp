#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace eigsgd {

/// Closed iteration interval [lo, hi].
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parses "A:B" (plain or scientific notation, e.g. "1e2:1e3").
Window parse_window(const std::string& text);

struct PhaseReport {
  double slope_early = 0.0;
  double slope_late = 0.0;
  std::size_t early_points = 0;
  std::size_t late_points = 0;
  double margin = 0.1;
  /// slope_late > slope_early + margin: the later decay is flatter.
  bool transition_detected = false;
};

/// Least-squares slopes of log(value) against log(iter) on two disjoint windows.
/// Values must be positive inside both windows, so pass second moments or
/// absolute means rather than signed components.
PhaseReport detect_phase_transition(std::span<const double> iters, std::span<const double> values, Window early,
                                    Window late, double margin = 0.1);

}  // namespace eigsgd
