#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "eigsgd/types.hpp"

namespace eigsgd {

enum class Spacing { linear, geometric };

std::string to_string(Spacing spacing);
Spacing parse_spacing(const std::string& text);

/// Shape and singular-value range of a synthetic least-squares instance.
struct SpectrumSpec {
  Index rows = 0;
  Index cols = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  Spacing spacing = Spacing::linear;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless rows >= cols >= 1 and 0 < sigma_min <= sigma_max.
  void validate() const;

  /// Descending spectrum with sigma_1 = sigma_max and sigma_N = sigma_min.
  Vector singular_values() const;

  bool operator==(const SpectrumSpec&) const = default;
};

/// Whether b lies in range(A), and if not how large the orthogonal residual is
/// relative to ||A x_true||.
struct Consistency {
  bool consistent = true;
  double noise_level = 0.0;

  static Consistency exact() { return {true, 0.0}; }
  static Consistency noisy(double noise_level) { return {false, noise_level}; }

  bool operator==(const Consistency&) const = default;
};

/// A = U diag(sigma) V^T with exactly known factors, minimizer and residual.
/// Immutable once built; safe to share across concurrent trajectory runs.
struct SyntheticProblem {
  RowMatrix A;
  Vector b;
  Matrix U;      // M x N, orthonormal columns u_l
  Vector sigma;  // descending
  Matrix V;      // N x N, orthonormal columns v_l
  Vector x_star;
  double F_star = 0.0;  // 1/2 ||A x_star - b||^2
  bool consistent = true;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  /// 1-based singular direction v_l.
  auto direction(Index ell) const { return V.col(ell - 1); }
};

/// Scalar constants entering the moment bounds.
struct ProblemConstants {
  Index rows = 0;               // M
  double L_tilde = 0.0;         // max_i ||a_i||^2
  double cA = 0.0;              // sigma_max^2 / sigma_min^2
  double frob_sq = 0.0;         // ||A||_F^2
  double sigma_noise_sq = 0.0;  // mean_i ||grad f_i(x_star)||^2, f_i = (M/2)(a_i^T x - b_i)^2
  double sigma_min_sq = 0.0;
  double sigma_max_sq = 0.0;
  double F_star = 0.0;
  bool consistent = true;
};

/// Orthonormalized seeded Gaussian (dim x cols) with a nonnegative diagonal
/// in the triangular factor, so the result is unique for a given seed.
Matrix random_orthonormal(Index dim, Index cols, std::uint64_t seed);

/// Matrix factors come from spec.seed; x_true and the perturbation from `data_seed`.
SyntheticProblem build_problem(const SpectrumSpec& spec, const Consistency& consistency,
                               std::uint64_t data_seed);

/// b = A x_true, x_star = x_true exactly.
SyntheticProblem assemble_consistent(Matrix U, Vector sigma, Matrix V, const Vector& x_true);

/// General right-hand side; x_star from the pseudoinverse, consistency detected
/// from the residual at the 1e-10 relative level.
SyntheticProblem assemble_problem(Matrix U, Vector sigma, Matrix V, Vector b);

ProblemConstants compute_constants(const SyntheticProblem& p);

/// Signed <x - x_star, v_ell>, ell in 1..N.
double component(const SyntheticProblem& p, const Vector& x, Index ell);

/// V^T (x - x_star): all N components at once.
Vector components(const SyntheticProblem& p, const Vector& x);

/// x_star + radius * w with w uniform on the unit sphere.
Vector initial_point(const SyntheticProblem& p, double radius, std::uint64_t seed);

/// FNV-1a over the bytes of A and b; identifies the instance in trace metadata.
std::uint64_t digest(const SyntheticProblem& p);

/// Writes A.csv, b.csv, sigma.csv, x_star.csv into `dir` (created if missing).
void write_problem_csv(const SyntheticProblem& p, const std::filesystem::path& dir);

}  // namespace eigsgd
