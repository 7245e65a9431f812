#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topolasso/homology.hpp"
#include "topolasso/random.hpp"
#include "topolasso/regression.hpp"
#include "topolasso/terms.hpp"

namespace topolasso {

struct SimConfig {
  int p = 8;
  int k = 3;               // candidate interaction order
  double rho = 0.0;        // AR(1) correlation, in [0, 1)
  double sigma = 1.0;      // noise standard deviation
  int n = 625;
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
  double test_fraction = 0.2;
  int replications = 50;
  std::uint64_t seed = 20260801;
  InteractionScheme scheme = InteractionScheme::StandardizedMainProductCentered;
  int mu_grid_size = 101;
  int cv_folds = 5;
  int nng_grid_size = 101;

  void validate() const;
};

/// A fixed true model: support, frozen coefficients (one U{1..5} draw per
/// term at construction, same across replications) and, where the
/// construction pins them, the Betti numbers of its closure.
struct ModelPreset {
  std::string name;
  ModelSupport support;
  Eigen::VectorXd coefficients;   // aligned with support's canonical order
  BettiVector documented_betti;   // empty when not asserted
};

/// The four built-in true models over p = 8 variables.
///   model1: all mains, all 28 pairs, the first 11 triples (47 terms).
///   model2: two blocks {1-4}, {5-8}, each a hollow tetrahedron (28 terms).
///   model3: hollow tetrahedron {1-4} plus edges {5,6} and {7,8} (20 terms).
///   model4: model2's mains and pairs plus the first 16 triples,
///           deliberately non-hierarchical (36 terms).
std::vector<ModelPreset> model_presets();
const ModelPreset& preset_by_name(const std::string& name);

/// n x p rows from the centred Gaussian with cov(x_i, x_j) = rho^|i-j|,
/// sampled through the AR(1) recursion (the lower-triangular factorization
/// of the covariance). Deterministic in (cfg.seed, replication).
Eigen::MatrixXd gen_design(const SimConfig& cfg, int replication);

/// y = design_columns * theta_true + sigma * eps over the candidate columns,
/// with theta_true the preset coefficients scattered into candidate
/// positions. No intercept.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& design_columns,
                             const ModelSupport& candidate_terms,
                             const ModelPreset& preset, double sigma, Rng& rng);

enum class Method {
  CcAllCycles,
  CcNoZeroCycles,
  CcHigherCycles,
  CcLowerCycles,
  LarsOls,
  Lasso,
  LassoCv,
  Nng,
  Maic,
};
std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct MethodStats {
  int completed = 0;
  int failures = 0;
  double me_mean = 0.0;
  double me_sd = 0.0;
  double size_mean = 0.0;
  double size_sd = 0.0;
};

struct ExperimentCell {
  double sigma = 0.0;
  double rho = 0.0;
  std::vector<MethodStats> stats;  // aligned with ExperimentReport::methods
};

struct ExperimentReport {
  SimConfig config;
  std::string preset;
  std::vector<Method> methods;
  std::vector<ExperimentCell> cells;
};

/// Runs `cfg.replications` independent replications per (sigma, rho) cell.
/// Each method reports the oracle model error (validation second moment)
/// and the selected-support size; per-replication failures are counted and
/// excluded from the averages. Replications may run on `jobs` threads; the
/// result only depends on (seed, cell, replication).
ExperimentReport run_experiment(const SimConfig& cfg, const ModelPreset& preset,
                                const std::vector<Method>& methods,
                                const std::vector<double>& sigmas,
                                const std::vector<double>& rhos, int jobs = 1);

inline ExperimentReport run_experiment(const SimConfig& cfg,
                                       const ModelPreset& preset,
                                       const std::vector<Method>& methods,
                                       int jobs = 1) {
  return run_experiment(cfg, preset, methods, {cfg.sigma}, {cfg.rho}, jobs);
}

}  // namespace topolasso
