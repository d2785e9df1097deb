#include <gtest/gtest.h>

#include <random>

#include "eigsgd/rate_bounds.hpp"
#include "eigsgd/theory.hpp"
#include "support.hpp"

using namespace eigsgd;
using namespace eigsgd::testing;

namespace {

// The pieces of C_0 summed term by term from the exact backward series.
struct ExactPieces {
  double A0, B0, qB, AC, C_last, C0;
};

ExactPieces exact_pieces(const ProblemConstants& c, const StepSchedule& s, double sigma_sq, std::int64_t n) {
  const auto series = second_moment_series(c, s, sigma_sq, n);
  const CoefficientFunctions f(c);
  ExactPieces e{series.A[0], series.B[0], 0.0, 0.0, f.C(s.step_at(n)), series.C[0]};
  for (std::int64_t i = 1; i <= n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double alpha = s.step_at(i - 1);
    e.qB += f.q(alpha) * series.B[u];
    e.AC += series.A[u] * f.C(alpha);
  }
  return e;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
  }
  return sxy / sxx;
}

class RateBoundsTest : public ::testing::Test {
 protected:
  SyntheticProblem noisy = small_problem(30, 20, false);
  ProblemConstants c = compute_constants(noisy);
  ProblemConstants c_exact = compute_constants(small_problem(30, 20, true));
};

}  // namespace

TEST_F(RateBoundsTest, HarmonicHorizonZero) {
  const auto r = rate_bounds_harmonic(c, 0.5, 20, 0.64, 0);
  EXPECT_EQ(r.A0, 1.0);
  EXPECT_DOUBLE_EQ(r.C_last, CoefficientFunctions(c).C(0.5 / 20));
}

TEST_F(RateBoundsTest, HarmonicClosedFormForA0) {
  for (std::int64_t n : {1, 100, 100000})
    EXPECT_DOUBLE_EQ(rate_bounds_harmonic(c, 0.5, 20, 0.64, n).A0, std::pow(20.0 / (20.0 + n), 2 * 0.5 * 0.64));
}

TEST_F(RateBoundsTest, ThresholdsThrow) {
  EXPECT_THROW(rate_bounds_harmonic(c, 0.5, 1.0, 0.64, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_harmonic(c, 0.5, 0.5, 0.64, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_harmonic(c, 2.0 / c.sigma_min_sq, 20, 0.01, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_harmonic(c, 1.0, 20, 0.5, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_polynomial(c, 0.2, 5, 1.0, 0.5, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_polynomial(c, 0.2, 5, 0.5, 0.5, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_polynomial(c, 0.2, 1, 0.8, 0.5, 10), UnsupportedRegime);
  EXPECT_THROW(rate_bounds_harmonic(c, 0.5, 20, 0.64, -1), std::invalid_argument);
}

TEST_F(RateBoundsTest, NoiseSumExponentFitsByRegression) {
  const double a = 1.0 / c.sigma_min_sq;  // a sigma_min^2 = 1
  std::vector<double> ns, vals;
  for (double n = 1e3; n <= 1e5 * 1.0001; n *= std::pow(10.0, 0.125)) {
    const auto r = rate_bounds_harmonic(c, a, 2.0, 0.3, static_cast<std::int64_t>(n));
    ns.push_back(std::floor(n));
    vals.push_back(r.qB_sum);
  }
  const auto r = rate_bounds_harmonic(c, a, 2.0, 0.3, 10);
  EXPECT_NEAR(r.qB_exponent, 1.0, 1e-12);
  EXPECT_NEAR(-loglog_slope(ns, vals), 1.0, 0.05);
}

TEST_F(RateBoundsTest, ReportedExponentsFollowRegime) {
  const auto lo = rate_bounds_harmonic(c, 0.5, 20, 0.3, 10);
  EXPECT_DOUBLE_EQ(lo.A0_exponent, 0.3);
  EXPECT_DOUBLE_EQ(lo.AC_exponent, 0.3);
  EXPECT_DOUBLE_EQ(lo.B0_exponent, 0.5 * c.sigma_min_sq);
  EXPECT_DOUBLE_EQ(lo.C0_exponent(), std::min(lo.qB_exponent, lo.AC_exponent));
  const auto hi = rate_bounds_harmonic(c, 3.0 / c.sigma_min_sq, 2000, 0.9, 10);
  EXPECT_DOUBLE_EQ(hi.qB_exponent, 2.0);
  EXPECT_DOUBLE_EQ(hi.AC_exponent, 1.0);
}

// Random parameters with b > 2 a sigma_max^2 so every A(alpha_k) is positive.
TEST_F(RateBoundsTest, HarmonicDominatesExactPieces) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int draw = 0; draw < 60; ++draw) {
    const double a = 0.05 + 4.0 * unit(gen);
    const double b = 2.0 * a * c.sigma_max_sq * (1.05 + 3.0 * unit(gen)) + 1.0;
    const double sigma_sq = c.sigma_min_sq + (c.sigma_max_sq - c.sigma_min_sq) * unit(gen);
    for (std::int64_t n : {1, 10, 100, 1000}) {
      const auto r = rate_bounds_harmonic(c, a, b, sigma_sq, n);
      const auto e = exact_pieces(c, StepSchedule::harmonic(a, b), sigma_sq, n);
      const double tol = 1 + 1e-12;
      EXPECT_LE(e.A0, r.A0 * tol) << "a=" << a << " b=" << b << " n=" << n;
      EXPECT_LE(e.B0, r.B0 * tol) << "a=" << a << " b=" << b << " n=" << n;
      EXPECT_LE(e.qB, r.qB_sum * tol) << "a=" << a << " b=" << b << " n=" << n;
      EXPECT_LE(e.AC, r.AC_sum * tol) << "a=" << a << " b=" << b << " n=" << n;
      EXPECT_DOUBLE_EQ(e.C_last, r.C_last);
      EXPECT_LT(rel_err(e.qB + e.AC + e.C_last, e.C0), 1e-12);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 240);
}

TEST_F(RateBoundsTest, PolynomialDominatesExactPieces) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < 60; ++draw) {
    const double gamma = 0.55 + 0.4 * unit(gen);
    const double a = 0.02 + 1.0 * unit(gen);
    const double b = std::max(std::pow(2.0 * a * c.sigma_max_sq * (1.05 + 3.0 * unit(gen)), 1.0 / gamma), 1.0) + 1.0;
    const double sigma_sq = c.sigma_min_sq + (c.sigma_max_sq - c.sigma_min_sq) * unit(gen);
    for (std::int64_t n : {1, 10, 100, 1000}) {
      const auto r = rate_bounds_polynomial(c, a, b, gamma, sigma_sq, n);
      const auto e = exact_pieces(c, StepSchedule::polynomial(a, b, gamma), sigma_sq, n);
      const double tol = 1 + 1e-12;
      EXPECT_LE(e.A0, r.A0 * tol) << "a=" << a << " b=" << b << " g=" << gamma << " n=" << n;
      EXPECT_LE(e.B0, r.B0 * tol) << "a=" << a << " b=" << b << " g=" << gamma << " n=" << n;
      EXPECT_LE(e.qB, r.qB_sum * tol) << "a=" << a << " b=" << b << " g=" << gamma << " n=" << n;
      EXPECT_LE(e.AC, r.AC_sum * tol) << "a=" << a << " b=" << b << " g=" << gamma << " n=" << n;
      EXPECT_DOUBLE_EQ(e.C_last, r.C_last);
    }
  }
}

TEST_F(RateBoundsTest, ConsistentProblemZeroesConstantPieces) {
  const auto h = rate_bounds_harmonic(c_exact, 0.5, 20, 0.64, 1000);
  EXPECT_EQ(h.AC_sum, 0.0);
  EXPECT_EQ(h.C_last, 0.0);
  EXPECT_LE(h.qB_sum, 1e-20);
  const auto p = rate_bounds_polynomial(c_exact, 0.2, 5, 0.8, 0.64, 1000);
  EXPECT_EQ(p.AC_sum, 0.0);
  EXPECT_EQ(p.C_last, 0.0);
  EXPECT_LE(p.qB_sum, 1e-20);
}

TEST_F(RateBoundsTest, PolynomialA0IsMonotoneRootExponential) {
  const double a = 0.2, b = 5, gamma = 0.8, s2 = 0.5;
  const double rate = 2 * a * s2 / (1 - gamma);
  double prev = 1.0;
  for (std::int64_t n = 0; n <= 1000000; n = n ? n * 2 : 1) {
    const auto r = rate_bounds_polynomial(c, a, b, gamma, s2, n);
    const double direct = std::exp(rate * (std::pow(b, 1 - gamma) - std::pow(b + n, 1 - gamma)));
    EXPECT_LT(rel_err(r.A0, direct), 1e-12);
    EXPECT_LE(r.A0, prev);
    prev = r.A0;
    EXPECT_DOUBLE_EQ(r.A0_rate, rate);
    EXPECT_DOUBLE_EQ(r.qB_tail_exponent, 4 * gamma - 2);
    EXPECT_DOUBLE_EQ(r.AC_tail_exponent, 2 * gamma - 1);
  }
}

TEST_F(RateBoundsTest, SecondMomentSumsThePieces) {
  const auto r = rate_bounds_harmonic(c, 0.5, 20, 0.64, 500);
  EXPECT_DOUBLE_EQ(r.second_moment(2.0, 3.0), r.A0 * 2 + r.B0 * 3 + r.qB_sum + r.AC_sum + r.C_last);
}
