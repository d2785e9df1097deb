#pragma once

#include <cstdint>
#include <vector>

#include "eigsgd/problem.hpp"
#include "eigsgd/schedule.hpp"

namespace eigsgd {

/// One-step coefficient functions of the second-moment recursion, bound to a
/// problem's constants:
///   A(alpha) = 1 - 2 alpha sigma_l^2        B(alpha) = alpha^2 M L cA sigma_max^2
///   C(alpha) = 2 alpha^2 M L F*             p(alpha) = 1 - alpha sigma_min^2
///   q(alpha) = 2 alpha^2 sigma^2
class CoefficientFunctions {
 public:
  explicit CoefficientFunctions(const ProblemConstants& c);

  double A(double alpha, double sigma_sq) const { return 1.0 - 2.0 * alpha * sigma_sq; }
  double B(double alpha) const { return alpha * alpha * b_scale_; }
  double C(double alpha) const { return alpha * alpha * c_scale_; }
  double p(double alpha) const { return 1.0 - alpha * sigma_min_sq_; }
  double q(double alpha) const { return alpha * alpha * q_scale_; }

  /// M L cA sigma_max^2, the alpha^2 coefficient of B.
  double b_scale() const { return b_scale_; }

 private:
  double b_scale_;
  double c_scale_;
  double q_scale_;
  double sigma_min_sq_;
};

/// prod_{k=0}^{steps-1} (1 - alpha_k sigma_sq), accumulated as log-magnitude
/// plus sign so long products do not underflow early. steps = 0 gives 1.
double mean_factor(const StepSchedule& s, double sigma_sq, std::int64_t steps);

/// mean_factor at each entry of `steps` (ascending) in a single pass.
std::vector<double> mean_factors(const StepSchedule& s, double sigma_sq, const std::vector<std::int64_t>& steps);

/// E[<x_{n+1} - x*, v_l> | x0] = prod_{k=0}^{n} (1 - alpha_k sigma_l^2) <x0 - x*, v_l>.
/// Holds for GD exactly and for SGD in expectation.
double expected_component(const SyntheticProblem& p, const StepSchedule& s, Index ell, const Vector& x0,
                          std::int64_t n);

/// (b/(b+n))^{a sigma_sq} |c0|
double mean_bound_harmonic(double a, double b, double sigma_sq, double c0, std::int64_t n);

/// exp(r b^{1-gamma}) exp(-r (b+n)^{1-gamma}) |c0| with r = a sigma_sq / (1 - gamma)
double mean_bound_polynomial(double a, double b, double gamma, double sigma_sq, double c0, std::int64_t n);

struct FixedSecondMomentBound {
  double value = 0.0;  // base^{n+1} ||x0 - x*||^2
  double base = 0.0;   // 1 - 2 alpha sigma_min^2 + alpha^2 M L cA sigma_max^2
  bool contractive = false;
};

/// Fixed-step bound on E[<x_{n+1} - x*, v_l>^2], valid for every l. Consistent
/// problems only (throws HypothesisError otherwise).
FixedSecondMomentBound second_moment_bound_fixed(const SyntheticProblem& p, const ProblemConstants& c,
                                                 double alpha, const Vector& x0, std::int64_t n);

/// (A_0, B_0, C_0) for horizon n: E[<x_{n+1}-x*, v_l>^2 | x0] <= A_0 c0^2 + B_0 ||x0-x*||^2 + C_0.
struct MomentCoefficients {
  double A0 = 0.0;
  double B0 = 0.0;
  double C0 = 0.0;
  /// Some A(alpha_k) was negative (alpha_k > 1/(2 sigma_l^2)). The signed value
  /// is kept, but the bound may then fail to be monotone.
  bool negative_A = false;

  double evaluate(double c0_sq, double err0_sq) const { return A0 * c0_sq + B0 * err0_sq + C0; }
};

/// Single backward pass from k = n, O(n).
MomentCoefficients second_moment_recursion(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                           std::int64_t n);

MomentCoefficients second_moment_recursion(const SyntheticProblem& p, const ProblemConstants& c,
                                           const StepSchedule& s, Index ell, std::int64_t n);

/// Convenience: the recursion bound evaluated at x0.
double second_moment_bound(const SyntheticProblem& p, const ProblemConstants& c, const StepSchedule& s, Index ell,
                           const Vector& x0, std::int64_t n);

/// A_k, B_k, C_k for every k = 0..n of the horizon-n recursion.
struct MomentSeries {
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> C;
  bool negative_A = false;
};

MomentSeries second_moment_series(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                  std::int64_t n);

/// Recursion bound on E[<x_k - x*, v_l>^2] at every k in `iters` (ascending).
/// Propagates the coefficient triple forward, so all horizons cost O(max k)
/// instead of one backward pass each. k = 0 yields c0_sq.
std::vector<double> second_moment_curve(const ProblemConstants& c, const StepSchedule& s, double sigma_sq,
                                        double c0_sq, double err0_sq, const std::vector<std::int64_t>& iters);

/// (1 - sigma_l^2 / ||A||_F^2)^k <x0 - x*, v_l>, the expected randomized
/// Kaczmarz component. Consistent problems only.
double kaczmarz_expected_component(const SyntheticProblem& p, Index ell, const Vector& x0, std::int64_t k);

}  // namespace eigsgd
