#include "eigsgd/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace eigsgd {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(fmt::format("schedule parameter {} must be positive and finite, got {}", name, value));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

StepSchedule StepSchedule::fixed(double alpha) {
  require_positive(alpha, "alpha");
  return StepSchedule(FixedStep{alpha});
}

StepSchedule StepSchedule::harmonic(double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  return StepSchedule(HarmonicStep{a, b});
}

StepSchedule StepSchedule::polynomial(double a, double b, double gamma) {
  require_positive(a, "a");
  require_positive(b, "b");
  if (!(gamma > 0.5 && gamma < 1.0))
    throw std::invalid_argument(
        fmt::format("polynomial schedule requires gamma in the open interval (1/2, 1), got {}", gamma));
  return StepSchedule(PolynomialStep{a, b, gamma});
}

double StepSchedule::step_at(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("step index must be nonnegative");
  const double kk = static_cast<double>(k);
  return std::visit(overloaded{
                        [](const FixedStep& s) { return s.alpha; },
                        [kk](const HarmonicStep& s) { return s.a / (s.b + kk); },
                        [kk](const PolynomialStep& s) { return s.a / std::pow(s.b + kk, s.gamma); },
                    },
                    v_);
}

ScheduleKind StepSchedule::kind() const {
  return static_cast<ScheduleKind>(v_.index());
}

std::string StepSchedule::describe() const {
  return std::visit(overloaded{
                        [](const FixedStep& s) { return fmt::format("fixed(alpha={})", s.alpha); },
                        [](const HarmonicStep& s) { return fmt::format("harmonic(a={}, b={})", s.a, s.b); },
                        [](const PolynomialStep& s) {
                          return fmt::format("polynomial(a={}, b={}, gamma={})", s.a, s.b, s.gamma);
                        },
                    },
                    v_);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::fixed: return "fixed";
    case ScheduleKind::harmonic: return "harmonic";
    case ScheduleKind::polynomial: return "polynomial";
  }
  return "unknown";
}

std::string to_string(Diagnostic::Code code) {
  switch (code) {
    case Diagnostic::Code::step_exceeds_moment_cap: return "step_exceeds_moment_cap";
    case Diagnostic::Code::fixed_outside_window: return "fixed_outside_window";
    case Diagnostic::Code::mean_noncontractive: return "mean_noncontractive";
  }
  return "unknown";
}

std::vector<Diagnostic> validate(const StepSchedule& s, const ProblemConstants& c, std::int64_t horizon) {
  std::vector<Diagnostic> out;
  if (horizon < 1) horizon = 1;
  const double m = static_cast<double>(c.rows);
  const double cap = 1.0 / (2.0 * m * c.L_tilde);

  if (s.step_at(0) > cap) {
    // Decaying schedules are nonincreasing, so the offending steps form a prefix.
    std::int64_t last = horizon - 1;
    if (s.decaying()) {
      std::int64_t lo = 0, hi = horizon - 1;  // invariant: step_at(lo) > cap
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo + 1) / 2;
        if (s.step_at(mid) > cap) lo = mid;
        else hi = mid - 1;
      }
      last = lo;
    }
    out.push_back({Diagnostic::Code::step_exceeds_moment_cap,
                   fmt::format("alpha_k exceeds 1/(2 M L_tilde) = {:.6g} for k = {}..{}", cap, 0, last), 0, last});
  }

  if (const auto* f = std::get_if<FixedStep>(&s.variant())) {
    const double upper = 2.0 / (m * c.L_tilde * c.cA * c.cA);
    if (!(f->alpha < upper))
      out.push_back({Diagnostic::Code::fixed_outside_window,
                     fmt::format("fixed alpha = {} lies outside the second-moment window (0, {:.6g})", f->alpha, upper),
                     0, horizon - 1});
  }

  const double contraction = std::abs(1.0 - s.step_at(0) * c.sigma_max_sq);
  if (contraction >= 1.0)
    out.push_back({Diagnostic::Code::mean_noncontractive,
                   fmt::format("|1 - alpha_0 sigma_max^2| = {:.6g} >= 1; the mean recursion does not contract",
                               contraction),
                   0, 0});
  return out;
}

}  // namespace eigsgd
