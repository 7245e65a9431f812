#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "topolasso/random.hpp"

namespace oracles {

Eigen::VectorXd coordinate_descent_lasso(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y,
                                         double lambda, int max_sweeps,
                                         double tol) {
  const Eigen::Index n = X.rows();
  const Eigen::Index T = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(T);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd g(T);
  for (Eigen::Index j = 0; j < T; ++j)
    g[j] = X.col(j).squaredNorm() * inv_n;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < T; ++j) {
      if (g[j] == 0.0) continue;
      double rho = X.col(j).dot(residual) * inv_n + g[j] * theta[j];
      double next;
      if (rho > lambda)
        next = (rho - lambda) / g[j];
      else if (rho < -lambda)
        next = (rho + lambda) / g[j];
      else
        next = 0.0;
      double delta = next - theta[j];
      if (delta != 0.0) {
        residual -= X.col(j) * delta;
        theta[j] = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < tol * (1.0 + theta.cwiseAbs().maxCoeff())) break;
  }
  return theta;
}

int naive_z2_rank(std::vector<std::vector<int>> m) {
  if (m.empty() || m[0].empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && m[pivot][col] % 2 == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[row]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r != row && m[r][col] % 2 == 1)
        for (std::size_t c = 0; c < cols; ++c) m[r][c] = (m[r][c] + m[row][c]) % 2;
    }
    ++row;
    ++rank;
  }
  return rank;
}

std::vector<std::vector<int>> dense_of(const topolasso::BoundaryMatrix& b) {
  std::vector<std::vector<int>> out(b.rows(), std::vector<int>(b.cols(), 0));
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) out[r][c] = b.at(r, c) ? 1 : 0;
  return out;
}

topolasso::ModelSupport random_support(int p, int k, std::uint64_t seed,
                                       int max_terms) {
  topolasso::Rng rng(seed);
  int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_terms)));
  std::vector<topolasso::Term> terms;
  for (int t = 0; t < count; ++t) {
    int degree = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    std::uint64_t mask = 0;
    while (__builtin_popcountll(mask) < degree)
      mask |= (std::uint64_t{1} << rng.below(static_cast<std::uint64_t>(p)));
    terms.push_back(topolasso::Term(mask));
  }
  return topolasso::ModelSupport(terms, p);
}

topolasso::SimplicialComplex random_complex(int vertices, int max_dim,
                                            std::uint64_t seed) {
  topolasso::Rng rng(seed);
  int generators = 1 + static_cast<int>(rng.below(10));
  std::vector<topolasso::SimplexMask> gen;
  for (int g = 0; g < generators; ++g) {
    int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dim + 1)));
    std::uint64_t mask = 0;
    while (__builtin_popcountll(mask) < size)
      mask |= (std::uint64_t{1} << rng.below(static_cast<std::uint64_t>(vertices)));
    gen.push_back(mask);
  }
  return topolasso::SimplicialComplex::closure_of(gen, vertices);
}

Instance random_instance(int n, int terms, std::uint64_t seed, double noise) {
  topolasso::Rng rng(seed);
  Instance inst;
  inst.X.resize(n, terms);
  for (Eigen::Index r = 0; r < inst.X.rows(); ++r)
    for (Eigen::Index c = 0; c < inst.X.cols(); ++c)
      inst.X(r, c) = rng.gaussian();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(terms);
  int active = std::max(1, terms / 3);
  for (int i = 0; i < active; ++i) {
    Eigen::Index j = static_cast<Eigen::Index>(
        rng.below(static_cast<std::uint64_t>(terms)));
    theta[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + 2.0 * rng.uniform());
  }
  inst.y = inst.X * theta;
  for (Eigen::Index r = 0; r < inst.y.size(); ++r)
    inst.y[r] += noise * rng.gaussian();
  return inst;
}

Eigen::Vector2d brute_force_garrote(const Eigen::MatrixXd& Z,
                                    const Eigen::VectorXd& y, double lambda,
                                    double dmax, double step) {
  const double inv_n = 1.0 / static_cast<double>(Z.rows());
  // objective via the precomputed quadratic form
  Eigen::Matrix2d G = Z.transpose() * Z * inv_n;
  Eigen::Vector2d b = Z.transpose() * y * inv_n;
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_d(0, 0);
  for (double d1 = 0.0; d1 <= dmax + 1e-12; d1 += step) {
    for (double d2 = 0.0; d2 <= dmax + 1e-12; d2 += step) {
      double quad = 0.5 * (G(0, 0) * d1 * d1 + 2 * G(0, 1) * d1 * d2 +
                           G(1, 1) * d2 * d2);
      double value = quad - b[0] * d1 - b[1] * d2 + lambda * (d1 + d2);
      if (value < best) {
        best = value;
        best_d << d1, d2;
      }
    }
  }
  return best_d;
}

}  // namespace oracles
