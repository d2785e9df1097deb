#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eigsgd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row access dominates the stochastic solvers, so A is stored row-major.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Shape mismatch or out-of-range index.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A construction-time invariant check failed.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The closed-form bound's hypothesis does not hold for the supplied problem.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters sit exactly on a regime threshold (or outside the family's
/// domain) where the closed-form rate bounds are not defined.
class UnsupportedRegime : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterate became non-finite or exploded past the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::int64_t iteration, std::uint64_t seed)
      : std::runtime_error(what), iteration_(iteration), seed_(seed) {}

  std::int64_t iteration() const noexcept { return iteration_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::int64_t iteration_;
  std::uint64_t seed_;
};

}  // namespace eigsgd
