#pragma once

// Shared fixtures and brute-force oracles. Oracles here avoid the library's
// theory module on purpose: they enumerate branches or project explicitly.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "eigsgd/problem.hpp"
#include "eigsgd/schedule.hpp"
#include "eigsgd/solvers.hpp"

namespace eigsgd::testing {

inline SyntheticProblem small_problem(Index rows, Index cols, bool consistent, std::uint64_t seed = 5,
                                      double sigma_min = 0.1, double noise = 0.5) {
  SpectrumSpec spec{rows, cols, sigma_min, 1.0, Spacing::linear, seed};
  return build_problem(spec, consistent ? Consistency::exact() : Consistency::noisy(noise), seed + 1);
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

/// Exact mean and second moment of <x_1 - x*, v_l> over the M equally likely SGD rows.
struct BranchMoments {
  double mean = 0.0;
  double second = 0.0;
};

inline BranchMoments sgd_one_step_branches(const SyntheticProblem& p, const Vector& x, double alpha, Index ell) {
  BranchMoments out;
  const Index m = p.rows();
  const Vector v = p.V.col(ell - 1);
  for (Index i = 0; i < m; ++i) {
    // The update written out by hand, independent of sgd_step.
    const Eigen::RowVectorXd a = p.A.row(i);
    const double r = p.b[i] - a.dot(x);
    const Vector next = x + alpha * static_cast<double>(m) * r * a.transpose();
    const double c = (next - p.x_star).dot(v);
    out.mean += c / static_cast<double>(m);
    out.second += c * c / static_cast<double>(m);
  }
  return out;
}

/// Two SGD steps, all M^2 ordered row pairs.
inline double sgd_two_step_mean(const SyntheticProblem& p, const Vector& x, double alpha0, double alpha1,
                                Index ell) {
  const Index m = p.rows();
  const double md = static_cast<double>(m);
  const Vector v = p.V.col(ell - 1);
  double mean = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Eigen::RowVectorXd ai = p.A.row(i);
    const Vector x1 = x + alpha0 * md * (p.b[i] - ai.dot(x)) * ai.transpose();
    for (Index j = 0; j < m; ++j) {
      const Eigen::RowVectorXd aj = p.A.row(j);
      const Vector x2 = x1 + alpha1 * md * (p.b[j] - aj.dot(x1)) * aj.transpose();
      mean += (x2 - p.x_star).dot(v) / (md * md);
    }
  }
  return mean;
}

/// E over rows weighted by ||a_i||^2 / ||A||_F^2 of <Kaczmarz projection - x*, v_l>.
inline double kaczmarz_one_step_mean(const SyntheticProblem& p, const Vector& x, Index ell) {
  const double frob = p.A.squaredNorm();
  const Vector v = p.V.col(ell - 1);
  double mean = 0.0;
  for (Index i = 0; i < p.rows(); ++i) {
    const Eigen::RowVectorXd a = p.A.row(i);
    const double w = a.squaredNorm() / frob;
    const Vector next = x + ((p.b[i] - a.dot(x)) / a.squaredNorm()) * a.transpose();
    mean += w * (next - p.x_star).dot(v);
  }
  return mean;
}

/// 1/2 ||(I - A A^+) b||^2 with A^+ from a fresh SVD of A.
inline double projected_residual_half_sq(const SyntheticProblem& p) {
  const Matrix A = p.A;
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix pinv = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  const Vector r = p.b - A * (pinv * p.b);
  return 0.5 * r.squaredNorm();
}

/// (1/M) sum_i ||M (a_i^T x* - b_i) a_i||^2 by an explicit loop over rows.
inline double noise_by_rows(const SyntheticProblem& p) {
  const double m = static_cast<double>(p.rows());
  double total = 0.0;
  for (Index i = 0; i < p.rows(); ++i) {
    const Vector grad = m * (p.A.row(i).dot(p.x_star) - p.b[i]) * p.A.row(i).transpose();
    total += grad.squaredNorm();
  }
  return total / m;
}

inline Vector offset_point(const SyntheticProblem& p, std::uint64_t seed, double radius = 1.0) {
  return initial_point(p, radius, seed);
}

}  // namespace eigsgd::testing
