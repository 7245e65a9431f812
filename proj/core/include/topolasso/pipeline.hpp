#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "topolasso/regression.hpp"
#include "topolasso/terms.hpp"

namespace topolasso {

/// A LASSO path computed on unit-L2-norm columns, the classic LARS
/// reporting convention: breakpoint lambdas are n times the per-n
/// objective's lambdas and the coefficients are mapped back to the input
/// columns. Supports, closures and refits are unaffected by the rescale.
struct NormalizedPath {
  LassoPath path;
  Eigen::VectorXd column_norms;
};

NormalizedPath normalized_lasso_path(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y);

/// Contiguous train/validation/test tags: the first chunk trains.
std::vector<Dataset::Split> contiguous_splits(Eigen::Index n, double train,
                                              double validation, double test);

/// Random three-way split (deterministic in the seed).
std::vector<Dataset::Split> shuffled_splits(Eigen::Index n, double train,
                                            double validation, double test,
                                            std::uint64_t seed);

/// Everything the data-driven commands need: candidate terms, the design
/// with training statistics, per-split matrices, the (standardized)
/// response and the reported-scale path on the training rows.
struct PreparedFit {
  ModelSupport terms;
  DesignMatrix design;
  Eigen::MatrixXd X_train, X_validation, X_test;
  Eigen::VectorXd y_train, y_validation, y_test;
  ResponseScaler response_scaler;
  NormalizedPath npath;
};

PreparedFit prepare_fit(const Dataset& data, int order,
                        InteractionScheme scheme, bool standardize_response);

}  // namespace topolasso
