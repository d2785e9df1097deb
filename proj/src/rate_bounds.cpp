#include "eigsgd/rate_bounds.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "eigsgd/theory.hpp"

namespace eigsgd {
namespace {

void require_b_above_one(double b) {
  if (!(b > 1.0)) throw UnsupportedRegime(fmt::format("closed-form rate bounds need b > 1, got b = {}", b));
}

}  // namespace

HarmonicRateBounds rate_bounds_harmonic(const ProblemConstants& c, double a, double b, double sigma_sq,
                                        std::int64_t n) {
  if (n < 0) throw std::invalid_argument("horizon n must be >= 0");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  require_b_above_one(b);
  const double low = a * c.sigma_min_sq;
  const double mid = a * sigma_sq;
  if (low == 2.0) throw UnsupportedRegime("a sigma_min^2 = 2 sits on the regime threshold");
  if (mid == 0.5) throw UnsupportedRegime("a sigma_l^2 = 1/2 sits on the regime threshold");

  const CoefficientFunctions f(c);
  const double nn = static_cast<double>(n);
  const double m_l = static_cast<double>(c.rows) * c.L_tilde;
  const double b_scale = f.b_scale();

  HarmonicRateBounds r;
  r.A0 = std::pow(b / (b + nn), 2.0 * mid);
  r.B0 = a * a * b_scale / (b - 1.0) * std::pow((b + 1.0) / (b + nn + 1.0), low);

  const double qb_pref = 2.0 * std::pow(a, 4) * b_scale * c.sigma_noise_sq * std::pow((b + 1.0) / (b - 1.0), 3);
  if (low < 2.0) {
    r.qB_sum = qb_pref / (2.0 - low) * std::pow(b + 1.0, low - 2.0) / std::pow(b + nn + 1.0, low);
  } else {
    r.qB_sum = qb_pref / (low - 2.0) * std::pow(1.0 / (b + nn + 1.0), 2);
  }

  const double ac_pref = 2.0 * a * a * m_l * c.F_star * std::pow(b / (b - 1.0), 2);
  if (mid < 0.5) {
    r.AC_sum = ac_pref * std::pow(b, 2.0 * mid - 1.0) / (1.0 - 2.0 * mid) * std::pow(1.0 / (b + nn), 2.0 * mid);
  } else {
    r.AC_sum = ac_pref / (2.0 * mid - 1.0) / (b + nn);
  }
  r.C_last = f.C(a / (b + nn));

  r.A0_exponent = 2.0 * mid;
  r.B0_exponent = low;
  r.qB_exponent = std::min(low, 2.0);
  r.AC_exponent = std::min(2.0 * mid, 1.0);
  return r;
}

PolynomialRateBounds rate_bounds_polynomial(const ProblemConstants& c, double a, double b, double gamma,
                                            double sigma_sq, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("horizon n must be >= 0");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  if (!(gamma > 0.5 && gamma < 1.0))
    throw UnsupportedRegime(fmt::format("polynomial rate bounds need 1/2 < gamma < 1, got {}", gamma));
  require_b_above_one(b);

  const CoefficientFunctions f(c);
  const double nn = static_cast<double>(n);
  const double m_l = static_cast<double>(c.rows) * c.L_tilde;
  const double b_scale = f.b_scale();
  const double one_m = 1.0 - gamma;
  const double two_g_m1 = 2.0 * gamma - 1.0;
  const double half_gap = 1.0 - std::pow(0.5, one_m);

  PolynomialRateBounds r;
  r.A0_rate = 2.0 * a * sigma_sq / one_m;
  r.B0_rate = a * c.sigma_min_sq / one_m;
  r.qB_tail_exponent = 4.0 * gamma - 2.0;
  r.AC_tail_exponent = two_g_m1;

  r.A0 = std::exp(r.A0_rate * (std::pow(b, one_m) - std::pow(b + nn, one_m)));
  r.B0 = a * a * b_scale / two_g_m1 * std::pow(b - 1.0, 1.0 - 2.0 * gamma) *
         std::exp(r.B0_rate * (std::pow(b + 1.0, one_m) - std::pow(b + nn + 1.0, one_m)));

  const double qb_pref = 2.0 * std::pow(a, 4) * b_scale * c.sigma_noise_sq / (2.0 * two_g_m1 * two_g_m1) *
                         std::pow((b - 1.0) / (b + 1.0), 1.0 - 4.0 * gamma);
  r.qB_sum = qb_pref * (std::exp(-r.B0_rate * half_gap * std::pow(b + nn + 1.0, one_m)) *
                            std::pow(b + 1.0, 2.0 - 4.0 * gamma) +
                        std::pow((b + nn + 1.0) / 2.0, 2.0 - 4.0 * gamma));

  const double ac_pref = 2.0 * a * a * m_l * c.F_star / two_g_m1 * std::pow((b - 1.0) / b, -2.0 * gamma);
  r.AC_sum = ac_pref * (std::exp(-r.A0_rate * half_gap * std::pow(nn, one_m)) * std::pow(b, 1.0 - 2.0 * gamma) +
                        std::pow((b + nn) / 2.0, 1.0 - 2.0 * gamma));
  r.C_last = f.C(a / std::pow(b + nn, gamma));
  return r;
}

}  // namespace eigsgd
