#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "topolasso/homology.hpp"
#include "topolasso/terms.hpp"

// Independent reference implementations the tests check the library against.
// Everything here is deliberately written with different machinery than the
// code under test (plain loops, no bit packing, no LARS bookkeeping).
namespace oracles {

/// Cyclic coordinate descent for (1/2n)||y - X theta||^2 + lambda||theta||_1.
Eigen::VectorXd coordinate_descent_lasso(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y,
                                         double lambda, int max_sweeps = 100000,
                                         double tol = 1e-13);

/// Z2 rank by textbook row echelon on an int matrix.
int naive_z2_rank(std::vector<std::vector<int>> m);

/// Unpacks a boundary matrix into plain ints.
std::vector<std::vector<int>> dense_of(const topolasso::BoundaryMatrix& b);

/// Random term set over p variables with degrees <= k (not closed).
topolasso::ModelSupport random_support(int p, int k, std::uint64_t seed,
                                       int max_terms);

/// Downward closure of random generators: vertices <= `vertices`,
/// generator dimension <= max_dim.
topolasso::SimplicialComplex random_complex(int vertices, int max_dim,
                                            std::uint64_t seed);

struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};
/// Gaussian design, sparse coefficients, optional noise.
Instance random_instance(int n, int terms, std::uint64_t seed,
                         double noise = 0.5);

/// Exhaustive grid search for the 2-column non-negative garrote.
Eigen::Vector2d brute_force_garrote(const Eigen::MatrixXd& Z,
                                    const Eigen::VectorXd& y, double lambda,
                                    double dmax, double step);

}  // namespace oracles
