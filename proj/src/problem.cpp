#include "eigsgd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <fmt/os.h>

#include "eigsgd/rng.hpp"

namespace eigsgd {
namespace {

constexpr double kConstructionTol = 1e-10;

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  // Fill column by column so the draw order is fixed regardless of storage.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(engine);
  return g;
}

Vector gaussian_vector(Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

void check_orthonormal_columns(const Matrix& Q, const char* name) {
  const Matrix gram = Q.transpose() * Q;
  const double err = (gram - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
  if (!(err <= kConstructionTol))
    throw InvariantError(fmt::format("{} does not have orthonormal columns (max |Q^T Q - I| = {:.3g})",
                                     name, err));
}

void check_factors(const Matrix& U, const Vector& sigma, const Matrix& V) {
  const Index n = sigma.size();
  if (n < 1) throw DimensionError("at least one singular value is required");
  if (V.rows() != n || V.cols() != n)
    throw DimensionError(fmt::format("V must be {0}x{0}, got {1}x{2}", n, V.rows(), V.cols()));
  if (U.cols() != n || U.rows() < n)
    throw DimensionError(
        fmt::format("U must be Mx{} with M >= {}, got {}x{}", n, n, U.rows(), U.cols()));
  for (Index l = 0; l < n; ++l) {
    if (!(sigma[l] > 0.0) || !std::isfinite(sigma[l]))
      throw std::invalid_argument("singular values must be positive and finite");
    if (l > 0 && sigma[l] > sigma[l - 1])
      throw std::invalid_argument("singular values must be sorted in nonincreasing order");
  }
  check_orthonormal_columns(U, "U");
  check_orthonormal_columns(V, "V");
}

SyntheticProblem finish(Matrix U, Vector sigma, Matrix V, Vector b, Vector x_star, bool consistent) {
  SyntheticProblem p;
  p.A = U * sigma.asDiagonal() * V.transpose();
  p.U = std::move(U);
  p.sigma = std::move(sigma);
  p.V = std::move(V);
  p.b = std::move(b);
  p.x_star = std::move(x_star);
  p.consistent = consistent;

  const Vector residual = p.A * p.x_star - p.b;
  p.F_star = consistent ? 0.0 : 0.5 * residual.squaredNorm();

  const double a_norm = p.A.norm();
  const double recon = (Matrix(p.A) * p.V - p.U * p.sigma.asDiagonal()).norm();
  if (!(recon <= kConstructionTol * a_norm))
    throw InvariantError(fmt::format("A v_l != sigma_l u_l (residual {:.3g})", recon));

  const double normal_eq = (p.A.transpose() * residual).norm();
  const double atb = (p.A.transpose() * p.b).norm();
  if (!(normal_eq <= kConstructionTol * atb + 1e-300))
    throw InvariantError(fmt::format("normal equations violated at x_star ({:.3g} vs {:.3g})",
                                     normal_eq, atb));
  if (consistent && !(residual.norm() <= kConstructionTol * p.b.norm() + 1e-300))
    throw InvariantError("consistent instance has a nonzero residual at x_star");
  if (!consistent && !(p.F_star > 0.0))
    throw InvariantError("inconsistent instance has zero residual at x_star");
  return p;
}

}  // namespace

std::string to_string(Spacing spacing) {
  return spacing == Spacing::linear ? "linear" : "geometric";
}

Spacing parse_spacing(const std::string& text) {
  if (text == "linear") return Spacing::linear;
  if (text == "geometric") return Spacing::geometric;
  throw std::invalid_argument("spacing must be 'linear' or 'geometric', got '" + text + "'");
}

void SpectrumSpec::validate() const {
  if (cols < 1) throw std::invalid_argument("cols must be >= 1");
  if (rows < cols) throw std::invalid_argument("rows must be >= cols (underdetermined systems are not supported)");
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min))
    throw std::invalid_argument("sigma_min must be positive");
  if (!(sigma_max >= sigma_min) || !std::isfinite(sigma_max))
    throw std::invalid_argument("sigma_max must be finite and >= sigma_min");
}

Vector SpectrumSpec::singular_values() const {
  validate();
  Vector s(cols);
  if (cols == 1) {
    s[0] = sigma_max;
    return s;
  }
  const double last = static_cast<double>(cols - 1);
  for (Index l = 0; l < cols; ++l) {
    const double t = static_cast<double>(l) / last;
    s[l] = spacing == Spacing::linear ? sigma_max + (sigma_min - sigma_max) * t
                                      : sigma_max * std::pow(sigma_min / sigma_max, t);
  }
  s[0] = sigma_max;
  s[cols - 1] = sigma_min;
  return s;
}

Matrix random_orthonormal(Index dim, Index cols, std::uint64_t seed) {
  if (cols < 1 || dim < 1) throw DimensionError("random_orthonormal needs positive dimensions");
  if (cols > dim)
    throw DimensionError(fmt::format("cannot fit {} orthonormal columns in dimension {}", cols, dim));
  const Matrix g = gaussian_matrix(dim, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, cols);
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < cols; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

SyntheticProblem build_problem(const SpectrumSpec& spec, const Consistency& consistency,
                               std::uint64_t data_seed) {
  Vector sigma = spec.singular_values();
  Matrix U = random_orthonormal(spec.rows, spec.cols, rng::mix(spec.seed, 1));
  Matrix V = random_orthonormal(spec.cols, spec.cols, rng::mix(spec.seed, 2));
  const Vector x_true = gaussian_vector(spec.cols, rng::mix(data_seed, 3));

  if (consistency.consistent) return assemble_consistent(std::move(U), std::move(sigma), std::move(V), x_true);

  if (!(consistency.noise_level > 0.0) || !std::isfinite(consistency.noise_level))
    throw std::invalid_argument("noise_level must be positive for an inconsistent instance");
  if (spec.rows == spec.cols)
    throw std::invalid_argument("an inconsistent instance needs rows > cols (range(A) is all of R^M otherwise)");

  const Vector clean = U * sigma.asDiagonal() * (V.transpose() * x_true);
  const Vector r = gaussian_vector(spec.rows, rng::mix(data_seed, 4));
  const Vector r_perp = r - U * (U.transpose() * r);
  const double scale = consistency.noise_level * clean.norm() / r_perp.norm();
  Vector b = clean + scale * r;
  Vector x_star = V * (U.transpose() * b).cwiseQuotient(sigma);
  return finish(std::move(U), std::move(sigma), std::move(V), std::move(b), std::move(x_star), false);
}

SyntheticProblem assemble_consistent(Matrix U, Vector sigma, Matrix V, const Vector& x_true) {
  check_factors(U, sigma, V);
  if (x_true.size() != sigma.size()) throw DimensionError("x_true length must equal N");
  const RowMatrix A = U * sigma.asDiagonal() * V.transpose();
  Vector b = A * x_true;
  return finish(std::move(U), std::move(sigma), std::move(V), std::move(b), x_true, true);
}

SyntheticProblem assemble_problem(Matrix U, Vector sigma, Matrix V, Vector b) {
  check_factors(U, sigma, V);
  if (b.size() != U.rows()) throw DimensionError("b length must equal M");
  const Vector coeffs = U.transpose() * b;
  const double perp = (b - U * coeffs).norm();
  const bool consistent = perp <= kConstructionTol * b.norm();
  Vector x_star = V * coeffs.cwiseQuotient(sigma);
  return finish(std::move(U), std::move(sigma), std::move(V), std::move(b), std::move(x_star), consistent);
}

ProblemConstants compute_constants(const SyntheticProblem& p) {
  ProblemConstants c;
  const Index m = p.rows();
  c.rows = m;
  const Vector row_sq = p.A.rowwise().squaredNorm();
  c.L_tilde = row_sq.maxCoeff();
  c.sigma_max_sq = p.sigma[0] * p.sigma[0];
  c.sigma_min_sq = p.sigma[p.sigma.size() - 1] * p.sigma[p.sigma.size() - 1];
  c.cA = c.sigma_max_sq / c.sigma_min_sq;
  c.frob_sq = p.A.squaredNorm();
  c.F_star = p.F_star;
  c.consistent = p.consistent;

  // ||grad f_i(x_star)||^2 = M^2 r_i^2 ||a_i||^2, averaged over the M rows.
  const Vector residual = p.A * p.x_star - p.b;
  c.sigma_noise_sq = static_cast<double>(m) * residual.cwiseAbs2().dot(row_sq);
  // Consistent instances have zero residual by construction; drop roundoff.
  if (p.consistent) c.sigma_noise_sq = 0.0;
  return c;
}

double component(const SyntheticProblem& p, const Vector& x, Index ell) {
  if (ell < 1 || ell > p.cols())
    throw DimensionError(fmt::format("component index {} outside 1..{}", ell, p.cols()));
  if (x.size() != p.cols()) throw DimensionError("x length must equal N");
  return (x - p.x_star).dot(p.direction(ell));
}

Vector components(const SyntheticProblem& p, const Vector& x) {
  if (x.size() != p.cols()) throw DimensionError("x length must equal N");
  return p.V.transpose() * (x - p.x_star);
}

Vector initial_point(const SyntheticProblem& p, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("x0 radius must be >= 0");
  Vector w = gaussian_vector(p.cols(), rng::mix(seed, 5));
  w /= w.norm();
  return p.x_star + radius * w;
}

std::uint64_t digest(const SyntheticProblem& p) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](const double* data, Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (Index i = 0; i < n * static_cast<Index>(sizeof(double)); ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ULL;
    }
  };
  feed(p.A.data(), p.A.size());
  feed(p.b.data(), p.b.size());
  return h;
}

void write_problem_csv(const SyntheticProblem& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_matrix = [&dir](const std::string& name, const auto& m) {
    auto out = fmt::output_file((dir / name).string());
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (j) out.print(",");
        out.print("{:.17g}", m(i, j));
      }
      out.print("\n");
    }
  };
  write_matrix("A.csv", p.A);
  write_matrix("b.csv", p.b);
  write_matrix("sigma.csv", p.sigma);
  write_matrix("x_star.csv", p.x_star);
}

}  // namespace eigsgd
