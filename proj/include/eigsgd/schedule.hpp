#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "eigsgd/problem.hpp"

namespace eigsgd {

struct FixedStep {
  double alpha;
  bool operator==(const FixedStep&) const = default;
};

/// alpha_k = a / (b + k)
struct HarmonicStep {
  double a;
  double b;
  bool operator==(const HarmonicStep&) const = default;
};

/// alpha_k = a / (b + k)^gamma, 1/2 < gamma < 1
struct PolynomialStep {
  double a;
  double b;
  double gamma;
  bool operator==(const PolynomialStep&) const = default;
};

enum class ScheduleKind { fixed, harmonic, polynomial };

/// Step-size schedule indexed from k = 0; alpha_k produces x_{k+1}.
/// Parameters are validated on construction (std::invalid_argument).
class StepSchedule {
 public:
  using Variant = std::variant<FixedStep, HarmonicStep, PolynomialStep>;

  static StepSchedule fixed(double alpha);
  static StepSchedule harmonic(double a, double b);
  static StepSchedule polynomial(double a, double b, double gamma);

  double step_at(std::int64_t k) const;
  double operator()(std::int64_t k) const { return step_at(k); }

  ScheduleKind kind() const;
  bool decaying() const { return kind() != ScheduleKind::fixed; }
  const Variant& variant() const { return v_; }

  /// e.g. "harmonic(a=0.5, b=20)"; used in CSV headers.
  std::string describe() const;

  bool operator==(const StepSchedule&) const = default;

 private:
  explicit StepSchedule(Variant v) : v_(v) {}
  Variant v_;
};

std::string to_string(ScheduleKind kind);

struct Diagnostic {
  enum class Code {
    step_exceeds_moment_cap,  // alpha_k > 1/(2 M L_tilde); the ||x - x*||^2 recursion may not apply
    fixed_outside_window,     // fixed alpha outside (0, 2/(M L_tilde cA^2))
    mean_noncontractive,      // |1 - alpha_0 sigma_max^2| >= 1
  };
  Code code;
  std::string message;
  std::int64_t first_k = 0;  // inclusive range of offending iterations
  std::int64_t last_k = 0;
};

std::string to_string(Diagnostic::Code code);

/// Checks the schedule against the problem constants over k = 0 .. horizon-1.
/// Findings are warnings; runs proceed regardless.
std::vector<Diagnostic> validate(const StepSchedule& s, const ProblemConstants& c, std::int64_t horizon);

}  // namespace eigsgd
