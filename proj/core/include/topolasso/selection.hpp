#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "topolasso/homology.hpp"
#include "topolasso/regression.hpp"
#include "topolasso/terms.hpp"

namespace topolasso {

/// Which error enters the criterion numerator: the validation residual sum
/// of squares of the refit (real data), or the oracle model error against
/// the known truth (simulations only).
enum class ErrorMode { Validation, OracleModelError };

/// The four named Betti-weight presets plus arbitrary weights. With Betti
/// vector (b_0, ..., b_{k-1}) the score is the dot product b * A.
Eigen::VectorXd betti_weights_all_cycles(int length);
Eigen::VectorXd betti_weights_no_zero_cycles(int length);
Eigen::VectorXd betti_weights_higher_cycles(int length);   // beta_2 onward
Eigen::VectorXd betti_weights_lower_cycles(int length);    // beta_0 + beta_1

/// 101 equispaced weights on [0, 1].
std::vector<double> default_mu_grid();

struct CriterionConfig {
  std::vector<double> mu_grid = default_mu_grid();
  Eigen::VectorXd betti_weights;  // length must equal the path's Betti length
  ErrorMode mode = ErrorMode::Validation;

  void validate(int betti_length) const;
};

/// Truth inputs for oracle-mode selection (simulations).
struct OracleSpec {
  Eigen::VectorXd theta_true;      // over the candidate columns
  Eigen::MatrixXd second_moment;   // E(X X^T) estimate, validation split
};

/// Everything annotate_path needs besides the path itself: the candidate
/// terms (canonical order = column order), the training data the refits use,
/// the validation split, the Betti vector length (the candidate interaction
/// order), and optionally the oracle truth.
struct PathContext {
  const ModelSupport* terms = nullptr;
  Eigen::MatrixXd X_train;
  Eigen::VectorXd y_train;
  Eigen::MatrixXd X_validation;
  Eigen::VectorXd y_validation;
  Eigen::MatrixXd X_test;  // optional; enables the final arbitration stage
  Eigen::VectorXd y_test;
  int betti_length = 0;
  std::optional<OracleSpec> oracle;
};

struct AnnotatedBreakpoint {
  double lambda = 0.0;
  std::vector<int> support;     // nonzero columns at this breakpoint
  ModelSupport raw_terms;       // M_lambda
  ModelSupport closed_terms;    // hierarchical closure, topology only
  BettiVector betti;
  Eigen::VectorXd refit;        // LARS-OLS coefficients on the raw support
  bool refit_rank_deficient = false;
  double validation_error = std::numeric_limits<double>::quiet_NaN();
  double test_error = std::numeric_limits<double>::quiet_NaN();
  double model_error = std::numeric_limits<double>::quiet_NaN();
  bool usable = true;
  std::string note;
};

struct AnnotatedPath {
  std::vector<AnnotatedBreakpoint> breakpoints;  // ascending lambda
  int betti_length = 0;
  std::size_t usable_count() const;
};

/// Per breakpoint: closure and Betti vector of the closed support, LARS-OLS
/// refit of the raw support on the training split, validation RSS of the
/// refit, and (when the oracle is present) the model error. Refit failures
/// mark the breakpoint unusable instead of aborting the path.
AnnotatedPath annotate_path(const LassoPath& path, const PathContext& ctx);

/// CC(lambda, mu) over usable breakpoints; both terms are normalized by
/// their maxima over the path. When every Betti score is zero the topology
/// term is defined as zero everywhere and the surface is flagged.
struct CriterionSurface {
  std::vector<double> lambdas;
  std::vector<double> mus;
  Eigen::MatrixXd values;  // lambdas.size() x mus.size()
  bool topology_degenerate = false;
};

CriterionSurface compound_criterion(const AnnotatedPath& a,
                                    const CriterionConfig& cfg);

struct SelectionReport {
  double lambda_star = 0.0;
  double mu_star = 0.0;
  ModelSupport support;            // M* (raw support at lambda*)
  Eigen::VectorXd coefficients;    // theta* (the refit)
  CriterionSurface surface;
  std::string method = "cc";
};

/// Three-stage selection. Each weight mu proposes its criterion argmin
/// lambda*(mu) = argmin_lambda CC(lambda, mu); the final stage picks the
/// winner among these candidates by model error: the oracle model error in
/// oracle mode, the test-split error when test rows were annotated, and the
/// validation error otherwise. A plain argmin over (lambda, mu) would always
/// land on a zero-Betti-score breakpoint at mu = 1 (the void model scores
/// zero), so the candidates must compete on held-out error. Ties prefer the
/// larger lambda (the sparser model), then the smaller mu. Throws
/// std::runtime_error when no breakpoint is usable.
SelectionReport select_model(const AnnotatedPath& a,
                             const CriterionConfig& cfg);

/// Same selection with the topology term replaced by normalized support
/// size |M_lambda|.
CriterionSurface maic_criterion(const AnnotatedPath& a,
                                const std::vector<double>& mu_grid,
                                ErrorMode mode);
SelectionReport maic(const AnnotatedPath& a, const std::vector<double>& mu_grid,
                     ErrorMode mode);

/// The quadratic form (theta_hat - theta)^T M (theta_hat - theta), clamped
/// at zero. M must be the (symmetric PSD) second-moment estimate.
double model_error(const Eigen::VectorXd& theta_hat,
                   const Eigen::VectorXd& theta_true,
                   const Eigen::MatrixXd& second_moment);

}  // namespace topolasso
