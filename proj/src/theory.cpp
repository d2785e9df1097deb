#include "eigsgd/theory.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace eigsgd {
namespace {

/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
    else carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct SignedLogProduct {
  CompensatedSum log_abs;
  bool negative = false;
  bool zero = false;

  void multiply_by_one_minus(double x) {
    if (zero) return;
    const double f = 1.0 - x;
    if (f == 0.0) {
      zero = true;
    } else if (f > 0.0) {
      log_abs.add(std::log1p(-x));
    } else {
      negative = !negative;
      log_abs.add(std::log(-f));
    }
  }

  double value() const {
    if (zero) return 0.0;
    const double mag = std::exp(log_abs.value());
    return negative ? -mag : mag;
  }
};

double sigma_sq_of(const SyntheticProblem& p, Index ell) {
  if (ell < 1 || ell > p.cols())
    throw DimensionError(fmt::format("component index {} outside 1..{}", ell, p.cols()));
  const double s = p.sigma[ell - 1];
  return s * s;
}

void require_nonnegative(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("horizon n must be >= 0");
}

}  // namespace

CoefficientFunctions::CoefficientFunctions(const ProblemConstants& c)
    : b_scale_(static_cast<double>(c.rows) * c.L_tilde * c.cA * c.sigma_max_sq),
      c_scale_(2.0 * static_cast<double>(c.rows) * c.L_tilde * c.F_star),
      q_scale_(2.0 * c.sigma_noise_sq),
      sigma_min_sq_(c.sigma_min_sq) {}

double mean_factor(const StepSchedule& s, double sigma_sq, std::int64_t steps) {
  SignedLogProduct prod;
  for (std::int64_t k = 0; k < steps && !prod.zero; ++k) prod.multiply_by_one_minus(s.step_at(k) * sigma_sq);
  return prod.value();
}

std::vector<double> mean_factors(const StepSchedule& s, double sigma_sq, const std::vector<std::int64_t>& steps) {
  std::vector<double> out;
  out.reserve(steps.size());
  SignedLogProduct prod;
  std::int64_t done = 0;
  for (std::int64_t target : steps) {
    if (target < done) throw std::invalid_argument("mean_factors needs ascending step counts");
    for (; done < target; ++done) prod.multiply_by_one_minus(s.step_at(done) * sigma_sq);
    out.push_back(prod.value());
  }
  return out;
}

double expected_component(const SyntheticProblem& p, const StepSchedule& s, Index ell, const Vector& x0,
                          std::int64_t n) {
  require_nonnegative(n);
  const double c0 = component(p, x0, ell);
  if (c0 == 0.0) return 0.0;
  return mean_factor(s, sigma_sq_of(p, ell), n + 1) * c0;
}

double mean_bound_harmonic(double a, double b, double sigma_sq, double c0, std::int64_t n) {
  require_nonnegative(n);
  return std::pow(b / (b + static_cast<double>(n)), a * sigma_sq) * std::abs(c0);
}

double mean_bound_polynomial(double a, double b, double gamma, double sigma_sq, double c0, std::int64_t n) {
  require_nonnegative(n);
  if (!(gamma > 0.5 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (1/2, 1)");
  const double r = a * sigma_sq / (1.0 - gamma);
  // Combine the two exponentials before exponentiating; at n = 0 they cancel exactly.
  const double e = r * (std::pow(b, 1.0 - gamma) - std::pow(b + static_cast<double>(n), 1.0 - gamma));
  return std::exp(e) * std::abs(c0);
}

FixedSecondMomentBound second_moment_bound_fixed(const SyntheticProblem& p, const ProblemConstants& c,
                                                 double alpha, const Vector& x0, std::int64_t n) {
  require_nonnegative(n);
  if (!p.consistent)
    throw HypothesisError("the fixed-step second-moment bound requires a consistent problem (F* = 0)");
  FixedSecondMomentBound out;
  const CoefficientFunctions f(c);
  out.base = 1.0 - 2.0 * alpha * c.sigma_min_sq + f.B(alpha);
  out.contractive = out.base > 0.0 && out.base < 1.0;
  const double err0 = (x0 - p.x_star).squaredNorm();
  out.value = err0 == 0.0 ? 0.0 : std::pow(out.base, static_cast<double>(n) + 1.0) * err0;
  return out;
}

MomentCoefficients second_moment_recursion(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                           std::int64_t n) {
  require_nonnegative(n);
  const CoefficientFunctions f(c);
  double alpha = s.step_at(n);
  MomentCoefficients m{f.A(alpha, sigma_sq), f.B(alpha), f.C(alpha), false};
  m.negative_A = m.A0 < 0.0;
  for (std::int64_t k = n - 1; k >= 0; --k) {
    alpha = s.step_at(k);
    const double a_k = f.A(alpha, sigma_sq);
    m.negative_A = m.negative_A || a_k < 0.0;
    // Right-hand sides use the (k+1) coefficients.
    const double C = m.A0 * f.C(alpha) + m.B0 * f.q(alpha) + m.C0;
    const double B = m.A0 * f.B(alpha) + m.B0 * f.p(alpha);
    m.A0 *= a_k;
    m.B0 = B;
    m.C0 = C;
  }
  return m;
}

MomentCoefficients second_moment_recursion(const SyntheticProblem& p, const ProblemConstants& c,
                                           const StepSchedule& s, Index ell, std::int64_t n) {
  return second_moment_recursion(c, s, sigma_sq_of(p, ell), n);
}

double second_moment_bound(const SyntheticProblem& p, const ProblemConstants& c, const StepSchedule& s, Index ell,
                           const Vector& x0, std::int64_t n) {
  const double c0 = component(p, x0, ell);
  return second_moment_recursion(p, c, s, ell, n).evaluate(c0 * c0, (x0 - p.x_star).squaredNorm());
}

MomentSeries second_moment_series(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                  std::int64_t n) {
  require_nonnegative(n);
  const CoefficientFunctions f(c);
  const auto len = static_cast<std::size_t>(n) + 1;
  MomentSeries out;
  out.A.resize(len);
  out.B.resize(len);
  out.C.resize(len);
  double alpha = s.step_at(n);
  out.A[len - 1] = f.A(alpha, sigma_sq);
  out.B[len - 1] = f.B(alpha);
  out.C[len - 1] = f.C(alpha);
  out.negative_A = out.A[len - 1] < 0.0;
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const auto i = static_cast<std::size_t>(k);
    alpha = s.step_at(k);
    const double a_k = f.A(alpha, sigma_sq);
    out.negative_A = out.negative_A || a_k < 0.0;
    out.A[i] = out.A[i + 1] * a_k;
    out.B[i] = out.A[i + 1] * f.B(alpha) + out.B[i + 1] * f.p(alpha);
    out.C[i] = out.A[i + 1] * f.C(alpha) + out.B[i + 1] * f.q(alpha) + out.C[i + 1];
  }
  return out;
}

std::vector<double> second_moment_curve(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                        double c0_sq, double err0_sq, const std::vector<std::int64_t>& iters) {
  const CoefficientFunctions f(c);
  std::vector<double> out;
  out.reserve(iters.size());
  // comp bounds E<x_k - x*, v>^2, err bounds E||x_k - x*||^2.
  double comp = c0_sq;
  double err = err0_sq;
  std::int64_t k = 0;
  for (std::int64_t target : iters) {
    if (target < k) throw std::invalid_argument("second_moment_curve needs ascending iterations");
    for (; k < target; ++k) {
      const double alpha = s.step_at(k);
      comp = f.A(alpha, sigma_sq) * comp + f.B(alpha) * err + f.C(alpha);
      err = f.p(alpha) * err + f.q(alpha);
    }
    out.push_back(comp);
  }
  return out;
}

double kaczmarz_expected_component(const SyntheticProblem& p, Index ell, const Vector& x0, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (!p.consistent) throw HypothesisError("the Kaczmarz mean formula requires a consistent problem");
  const double ratio = sigma_sq_of(p, ell) / p.A.squaredNorm();
  const double c0 = component(p, x0, ell);
  if (k == 0) return c0;
  return std::pow(1.0 - ratio, static_cast<double>(k)) * c0;
}

}  // namespace eigsgd
