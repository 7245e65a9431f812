#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "topolasso/terms.hpp"

namespace topolasso {

/// Raw observations: an n x p predictor matrix, a response vector and
/// optional per-row split tags. Untagged datasets are all-training.
struct Dataset {
  enum class Split : std::uint8_t { Train, Validation, Test };

  Eigen::MatrixXd predictors;  // n x p
  Eigen::VectorXd response;    // n
  std::vector<Split> split;    // empty, or one tag per row

  Eigen::Index rows() const { return predictors.rows(); }
  Eigen::Index variable_count() const { return predictors.cols(); }
  std::vector<Eigen::Index> rows_with(Split s) const;
  void validate() const;
};

/// A main-effect column with (numerically) zero variance on the training
/// split; carries the offending 1-based variable index.
class DegenerateColumnError : public std::runtime_error {
 public:
  DegenerateColumnError(int variable, const std::string& what)
      : std::runtime_error(what), variable_(variable) {}
  int variable() const { return variable_; }

 private:
  int variable_;
};

/// How interaction columns are produced. Main effects are always centered
/// and scaled to unit (sample) standard deviation; interactions are centered
/// but never rescaled.
enum class InteractionScheme {
  /// Products of the raw predictor values, then centered. This is the
  /// construction behind the worked-example path table.
  RawProductCentered,
  /// Products of the standardized main effects, then centered.
  StandardizedMainProductCentered,
};

/// The augmented design for a candidate term set, with the training-split
/// statistics baked in so validation/test rows are transformed consistently.
struct DesignMatrix {
  ModelSupport terms;          // column order = canonical term order
  InteractionScheme scheme = InteractionScheme::RawProductCentered;
  Eigen::MatrixXd columns;     // all dataset rows, train-statistics applied
  Eigen::VectorXd main_mean;   // per raw variable
  Eigen::VectorXd main_sd;     // per raw variable (sample sd)
  Eigen::VectorXd column_center;  // per term column

  /// Transforms new raw predictor rows with the stored statistics.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& raw) const;
};

/// Builds the design for `terms` from `data`, computing all statistics on
/// the training rows only. Throws DegenerateColumnError when a main effect
/// is constant on the training split.
DesignMatrix build_design(const Dataset& data, const ModelSupport& terms,
                          InteractionScheme scheme);

/// Centering/scaling for the response, from training rows.
struct ResponseScaler {
  double mean = 0.0;
  double sd = 1.0;
  Eigen::VectorXd transform(const Eigen::VectorXd& y) const {
    return (y.array() - mean) / sd;
  }
};
ResponseScaler fit_response_scaler(const Eigen::VectorXd& y_train);

/// The full LASSO solution path for
///     (1/2n) ||y - X theta||^2 + lambda ||theta||_1,
/// stored at its breakpoints in ascending lambda order. lambdas.front() is 0
/// and all coefficients vanish at lambdas.back(). Coefficients move linearly
/// in lambda between consecutive breakpoints.
struct LassoPath {
  std::vector<double> lambdas;
  std::vector<Eigen::VectorXd> coefficients;   // one per breakpoint
  std::vector<std::vector<int>> supports;      // nonzero column indices

  std::size_t breakpoints() const { return lambdas.size(); }
};

/// Computes the path with the LARS algorithm under the LASSO modification
/// (variables can leave the active set). Entering ties break toward the
/// lowest column index; breakpoints closer than 1e-10 in lambda collapse.
/// Throws std::invalid_argument on non-finite input.
LassoPath lars_lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Coefficients at an arbitrary penalty: stored vector at a breakpoint,
/// linear interpolation between breakpoints, zeros beyond the last one.
/// Throws std::invalid_argument for lambda < 0.
Eigen::VectorXd coefficients_at(const LassoPath& path, double lambda);

struct OlsRefit {
  Eigen::VectorXd coefficients;  // full length, zeros off the support
  bool rank_deficient = false;   // solved via minimum-norm when true
};

/// Least squares restricted to `support` columns (empty support gives the
/// zero vector). Rank-deficient restricted designs fall back to the
/// minimum-norm solution and are flagged.
OlsRefit ols_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<int>& support);

/// The OLS stage required by the non-negative garrote is not available
/// (rank-deficient or under-determined design).
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-negative garrote path over a penalty grid: per lambda the shrink
/// factors D(lambda) >= 0 minimizing (1/2n)||y - Z D||^2 + lambda ||D||_1
/// with Z_j = x_j * theta_ols_j, plus the implied coefficients d_j *
/// theta_ols_j. Grid is ascending and spans [0, lambda_max].
struct GarrotePath {
  std::vector<double> lambdas;
  std::vector<Eigen::VectorXd> shrink;        // D(lambda)
  std::vector<Eigen::VectorXd> coefficients;  // D(lambda) .* theta_ols
  Eigen::VectorXd theta_ols;
};

/// Throws RankDeficientError when X lacks full column rank (n <= T or
/// collinear columns).
GarrotePath nonnegative_garrote(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y,
                                int grid_size = 101);

struct CvLassoResult {
  double lambda = 0.0;
  Eigen::VectorXd coefficients;
  std::vector<double> lambda_grid;     // candidate breakpoints (full fit)
  std::vector<double> mean_cv_error;   // aligned with lambda_grid
};

/// K-fold cross-validated LASSO on (X, y): folds are a seeded shuffle,
/// candidate lambdas are the full-fit breakpoints, the winner minimizes the
/// mean out-of-fold squared error (ties prefer the larger lambda), and the
/// returned coefficients come from the full fit at that lambda.
CvLassoResult cv_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       int folds, std::uint64_t seed);

}  // namespace topolasso
