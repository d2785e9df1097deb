#pragma once

#include <cstdint>

#include "eigsgd/problem.hpp"

namespace eigsgd {

/// Closed-form upper bounds on the pieces of the horizon-n second-moment
/// bound under alpha_k = a/(b+k).
///
/// A0     >= A_0 = prod_k A(alpha_k)              decays like (b+n)^{-2 a sigma_l^2}
/// B0     >= B_0                                  decays like (b+n)^{-a sigma_min^2}
/// qB_sum >= sum_{i=1}^n q(alpha_{i-1}) B_i       (b+n)^{-min(a sigma_min^2, 2)}
/// AC_sum >= sum_{i=1}^n A_i C(alpha_{i-1})       (b+n)^{-min(2 a sigma_l^2, 1)}
/// C_last  = C(alpha_n), exact
struct HarmonicRateBounds {
  double A0 = 0.0;
  double B0 = 0.0;
  double qB_sum = 0.0;
  double AC_sum = 0.0;
  double C_last = 0.0;

  double A0_exponent = 0.0;
  double B0_exponent = 0.0;
  double qB_exponent = 0.0;
  double AC_exponent = 0.0;

  /// Regime-selected decay exponent of C_0 (the slower of its two sums).
  double C0_exponent() const { return qB_exponent < AC_exponent ? qB_exponent : AC_exponent; }

  double second_moment(double c0_sq, double err0_sq) const {
    return A0 * c0_sq + B0 * err0_sq + qB_sum + AC_sum + C_last;
  }
};

/// Requires b > 1, a sigma_min^2 != 2 and a sigma_l^2 != 1/2 (the integral
/// comparisons split there); throws UnsupportedRegime otherwise.
HarmonicRateBounds rate_bounds_harmonic(const ProblemConstants& c, double a, double b, double sigma_sq,
                                        std::int64_t n);

/// Same decomposition under alpha_k = a/(b+k)^gamma. A0 and B0 decay
/// root-exponentially, exp(-rate (b+n)^{1-gamma}); the two C_0 pieces carry
/// polynomial tails (b+n)^{2-4 gamma} and (b+n)^{1-2 gamma}.
struct PolynomialRateBounds {
  double A0 = 0.0;
  double B0 = 0.0;
  double qB_sum = 0.0;
  double AC_sum = 0.0;
  double C_last = 0.0;

  double A0_rate = 0.0;  // 2 a sigma_l^2 / (1 - gamma)
  double B0_rate = 0.0;  // a sigma_min^2 / (1 - gamma)
  double qB_tail_exponent = 0.0;  // 4 gamma - 2
  double AC_tail_exponent = 0.0;  // 2 gamma - 1

  double C0_exponent() const { return qB_tail_exponent < AC_tail_exponent ? qB_tail_exponent : AC_tail_exponent; }

  double second_moment(double c0_sq, double err0_sq) const {
    return A0 * c0_sq + B0 * err0_sq + qB_sum + AC_sum + C_last;
  }
};

/// Requires 1/2 < gamma < 1 and b > 1; throws UnsupportedRegime otherwise.
PolynomialRateBounds rate_bounds_polynomial(const ProblemConstants& c, double a, double b, double gamma,
                                            double sigma_sq, std::int64_t n);

}  // namespace eigsgd
