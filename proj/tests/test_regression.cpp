#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topolasso/pipeline.hpp"
#include "topolasso/random.hpp"
#include "topolasso/regression.hpp"
#include "topolasso/terms.hpp"

using namespace topolasso;

namespace {

// the 10-point binary dataset of the worked example
Dataset worked_example() {
  Dataset ds;
  ds.predictors.resize(10, 3);
  ds.predictors << 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 0, 1, 1, 0,
      0, 0, 0, 1, 1, 1, 0, 1, 0, 1;
  ds.response.resize(10);
  ds.response << 1, 1, 1, 0, 0, 0, 0, 0, 1, 0;
  return ds;
}

PreparedFit worked_fit() {
  return prepare_fit(worked_example(), 3,
                     InteractionScheme::RawProductCentered,
                     /*standardize_response=*/true);
}

constexpr double kPathLambdas[8] = {0.0, 0.06, 0.15, 0.27, 0.4, 0.97, 1.22, 1.75};
const std::vector<std::vector<std::string>> kPathSupports = {
    {"1", "3", "12", "13", "123"},
    {"1", "2", "3", "12", "13", "23"},
    {"1", "2", "3", "12", "13"},
    {"1", "2", "3", "12"},
    {"2", "3", "12"},
    {"2", "3"},
    {"3"},
    {}};
constexpr double kPathCoefficients[8][7] = {
    {-1.02, 0, -1.00, 1.94, 1.94, 0, -0.97},
    {-0.72, 0.12, -0.83, 1.23, 1.13, -0.29, 0},
    {-0.48, 0.08, -0.74, 0.99, 0.63, 0, 0},
    {-0.15, 0.14, -0.52, 0.66, 0, 0, 0},
    {0, 0.18, -0.46, 0.31, 0, 0, 0},
    {0, 0.08, -0.26, 0, 0, 0, 0},
    {0, 0, -0.18, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0}};

std::vector<std::string> labels_of(const ModelSupport& terms,
                                   const std::vector<int>& support) {
  std::vector<std::string> out;
  for (int col : support) out.push_back(terms[static_cast<std::size_t>(col)].label());
  return out;
}

double sample_sd(const Eigen::VectorXd& v) {
  double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size() - 1));
}

// an exactly orthonormal design in the 1/n inner product
Eigen::MatrixXd orthonormal_design(int n, int T, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd raw(n, T);
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c) raw(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, T);
  return q * std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_CASE("build_design standardizes mains and centers interactions") {
  Dataset ds = worked_example();
  ModelSupport terms = enumerate_candidate_terms(3, 3);
  DesignMatrix design =
      build_design(ds, terms, InteractionScheme::RawProductCentered);
  REQUIRE(design.columns.rows() == 10);
  REQUIRE(design.columns.cols() == 7);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(design.columns.col(j).mean()) < 1e-10);
    CHECK(std::abs(sample_sd(design.columns.col(j)) - 1.0) < 1e-10);
  }
  for (Eigen::Index j = 3; j < 7; ++j)
    CHECK(std::abs(design.columns.col(j).mean()) < 1e-10);

  // a pre-standardized column passes through unchanged
  Dataset zs;
  zs.predictors.resize(6, 1);
  zs.predictors << -1.2, 0.3, 1.5, -0.8, 0.9, -0.7;
  Eigen::VectorXd col = zs.predictors.col(0);
  zs.predictors.col(0) =
      (col.array() - col.mean()) / sample_sd(col);
  zs.response = Eigen::VectorXd::Zero(6);
  DesignMatrix d2 = build_design(zs, enumerate_candidate_terms(1, 1),
                                 InteractionScheme::RawProductCentered);
  CHECK((d2.columns.col(0) - zs.predictors.col(0)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("interaction columns under the standardized-mains scheme") {
  Dataset ds = worked_example();
  ModelSupport terms = enumerate_candidate_terms(3, 3);
  DesignMatrix d =
      build_design(ds, terms, InteractionScheme::StandardizedMainProductCentered);
  // column 12 is the centered product of standardized mains
  Eigen::VectorXd z1 = d.columns.col(0), z2 = d.columns.col(1);
  Eigen::VectorXd prod = z1.cwiseProduct(z2);
  Eigen::VectorXd expected = prod.array() - prod.mean();
  CHECK((d.columns.col(3) - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("build_design reports zero-variance variables") {
  Dataset ds;
  ds.predictors.resize(5, 2);
  ds.predictors << 1, 3, 1, 4, 1, 5, 1, 6, 1, 7;
  ds.response = Eigen::VectorXd::Zero(5);
  try {
    build_design(ds, enumerate_candidate_terms(2, 2),
                 InteractionScheme::RawProductCentered);
    FAIL("expected DegenerateColumnError");
  } catch (const DegenerateColumnError& e) {
    CHECK(e.variable() == 1);
  }
}

TEST_CASE("standardization is split-safe") {
  Rng rng(99);
  Dataset ds;
  ds.predictors.resize(40, 2);
  for (Eigen::Index r = 0; r < 40; ++r) {
    ds.predictors(r, 0) = 3.0 + 2.0 * rng.gaussian();
    ds.predictors(r, 1) = -1.0 + 0.5 * rng.gaussian();
  }
  ds.response = Eigen::VectorXd::Zero(40);
  ds.split.assign(40, Dataset::Split::Validation);
  for (int r = 0; r < 20; ++r) ds.split[static_cast<std::size_t>(r)] = Dataset::Split::Train;

  ModelSupport terms = enumerate_candidate_terms(2, 2);
  DesignMatrix d = build_design(ds, terms, InteractionScheme::RawProductCentered);
  // training block is standardized...
  Eigen::VectorXd train_col = d.columns.col(0).head(20);
  CHECK(std::abs(train_col.mean()) < 1e-10);
  CHECK(std::abs(sample_sd(train_col) - 1.0) < 1e-10);
  // ...while the validation block keeps the training statistics, so its
  // mean reflects the true shift between the halves rather than being zero
  Eigen::VectorXd val_col = d.columns.col(0).tail(20);
  Eigen::VectorXd raw_val = ds.predictors.col(0).tail(20);
  double expect = (raw_val.mean() - d.main_mean[0]) / d.main_sd[0];
  CHECK(std::abs(val_col.mean() - expect) < 1e-12);
  // transform() reproduces the stored columns exactly
  CHECK((d.transform(ds.predictors) - d.columns).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("worked-example path matches the published table") {
  PreparedFit fit = worked_fit();
  const LassoPath& path = fit.npath.path;
  REQUIRE(path.breakpoints() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(path.lambdas[i] - kPathLambdas[i]) <= 0.01);
    CHECK(labels_of(fit.terms, path.supports[i]) == kPathSupports[i]);
    for (Eigen::Index j = 0; j < 7; ++j)
      CHECK(std::abs(path.coefficients[i][j] - kPathCoefficients[i][j]) <=
            0.02);
  }
}

TEST_CASE("zero response gives the trivial path") {
  Rng rng(5);
  Eigen::MatrixXd X(12, 4);
  for (Eigen::Index r = 0; r < 12; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) X(r, c) = rng.gaussian();
  LassoPath path = lars_lasso_path(X, Eigen::VectorXd::Zero(12));
  REQUIRE(path.breakpoints() == 1);
  CHECK(path.lambdas[0] == 0.0);
  CHECK(path.coefficients[0].isZero(0.0));
  CHECK(path.supports[0].empty());
}

TEST_CASE("orthonormal designs soft-threshold") {
  const int n = 64, T = 6;
  Eigen::MatrixXd X = orthonormal_design(n, T, 11);
  Rng rng(12);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.gaussian();
  Eigen::VectorXd c = X.transpose() * y / static_cast<double>(n);

  LassoPath path = lars_lasso_path(X, y);
  // every |c_j| is a breakpoint
  for (Eigen::Index j = 0; j < T; ++j) {
    double target = std::abs(c[j]);
    bool found = false;
    for (double lam : path.lambdas)
      if (std::abs(lam - target) < 1e-9) found = true;
    CHECK(found);
  }
  // soft-threshold closed form at arbitrary lambdas
  for (double lambda : {0.0, 0.01, 0.05, 0.1, 0.2}) {
    Eigen::VectorXd theta = coefficients_at(path, lambda);
    for (Eigen::Index j = 0; j < T; ++j) {
      double expect = (std::abs(c[j]) > lambda)
                          ? (c[j] > 0 ? c[j] - lambda : c[j] + lambda)
                          : 0.0;
      CHECK(std::abs(theta[j] - expect) < 1e-9);
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lars_lasso_path(X, y), std::invalid_argument);
}

TEST_CASE("coefficients_at interpolates and clamps") {
  PreparedFit fit = worked_fit();
  const LassoPath& path = fit.npath.path;

  // exact breakpoint returns the stored vector
  Eigen::VectorXd at = coefficients_at(path, path.lambdas[3]);
  CHECK((at - path.coefficients[3]).cwiseAbs().maxCoeff() == 0.0);

  // midpoint of the [0.97, 1.22] piece: term 3 interpolates to about -0.22
  // (term 2 is live on that interval too and interpolates to about 0.04)
  double mid = 0.5 * (path.lambdas[5] + path.lambdas[6]);
  Eigen::VectorXd th = coefficients_at(path, mid);
  CHECK(std::abs(th[2] + 0.22) < 0.01);
  CHECK(std::abs(th[1] - 0.04) < 0.01);
  for (Eigen::Index j = 0; j < 7; ++j)
    if (j != 1 && j != 2) CHECK(th[j] == 0.0);

  // beyond the last breakpoint everything is zero
  CHECK(coefficients_at(path, 10.0).isZero(0.0));
  CHECK_THROWS_AS(coefficients_at(path, -0.1), std::invalid_argument);
}

TEST_CASE("KKT, sign patterns and oracle agreement on random instances") {
  int checked_paths = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng meta(3000 + seed);
    int n = 20 + static_cast<int>(meta.below(81));   // <= 100
    int T = 5 + static_cast<int>(meta.below(46));    // <= 50
    oracles::Instance inst = oracles::random_instance(n, T, 555 + seed);
    LassoPath path = lars_lasso_path(inst.X, inst.y);
    ++checked_paths;
    const double inv_n = 1.0 / static_cast<double>(n);

    CHECK(path.lambdas.front() == 0.0);
    CHECK(path.coefficients.back().isZero(0.0));

    for (std::size_t i = 0; i < path.breakpoints(); ++i) {
      double lambda = path.lambdas[i];
      const Eigen::VectorXd& theta = path.coefficients[i];
      Eigen::VectorXd c = inst.X.transpose() * (inst.y - inst.X * theta) * inv_n;
      for (Eigen::Index j = 0; j < T; ++j) {
        CHECK(std::abs(c[j]) <= lambda + 1e-8);
        if (theta[j] != 0.0) {
          CHECK(std::abs(std::abs(c[j]) - lambda) <= 1e-8);
          // sign(c_j) = sign(theta_j); vacuous at the lambda = 0 endpoint
          if (lambda > 1e-10) CHECK(c[j] * theta[j] > 0.0);
        }
      }
    }

    // sign constancy: the midpoint sign equals a nonzero endpoint's sign
    for (std::size_t i = 0; i + 1 < path.breakpoints(); ++i) {
      double mid = 0.5 * (path.lambdas[i] + path.lambdas[i + 1]);
      Eigen::VectorXd thm = coefficients_at(path, mid);
      for (Eigen::Index j = 0; j < T; ++j) {
        double lo = path.coefficients[i][j];
        double hi = path.coefficients[i + 1][j];
        double m = thm[j];
        if (lo == 0.0 && hi == 0.0) {
          CHECK(m == 0.0);
        } else {
          CHECK(lo * hi >= 0.0);  // no sign flip across a piece
          double sign_ref = (lo != 0.0) ? lo : hi;
          CHECK(m * sign_ref > 0.0);
        }
      }
    }

    // agreement with coordinate descent at sampled lambdas
    Rng pick(700 + seed);
    double lambda_max = path.lambdas.back();
    for (int s = 0; s < 6; ++s) {
      double lambda = lambda_max * pick.uniform();
      Eigen::VectorXd ours = coefficients_at(path, lambda);
      Eigen::VectorXd cd =
          oracles::coordinate_descent_lasso(inst.X, inst.y, lambda);
      CHECK((ours - cd).cwiseAbs().maxCoeff() < 1e-6);
    }

    // full shrinkage at the computed threshold
    double threshold =
        (inst.X.transpose() * inst.y * inv_n).cwiseAbs().maxCoeff();
    CHECK(std::abs(lambda_max - threshold) < 1e-10);
    CHECK(coefficients_at(path, threshold * 1.0000001).isZero(0.0));
  }
  CHECK(checked_paths == 30);
}

TEST_CASE("ols_refit behaviour") {
  PreparedFit fit = worked_fit();

  OlsRefit empty = ols_refit(fit.X_train, fit.y_train, {});
  CHECK(empty.coefficients.isZero(0.0));

  // single-column refit equals the simple-regression slope
  OlsRefit single = ols_refit(fit.X_train, fit.y_train, {2});
  CHECK(std::abs(single.coefficients[2] - (-0.5833333333333334)) < 1e-12);
  for (Eigen::Index j = 0; j < 7; ++j)
    if (j != 2) CHECK(single.coefficients[j] == 0.0);

  // residual orthogonal to the support columns
  std::vector<int> support = {0, 2, 3};
  OlsRefit refit = ols_refit(fit.X_train, fit.y_train, support);
  Eigen::VectorXd resid = fit.y_train - fit.X_train * refit.coefficients;
  for (int col : support)
    CHECK(std::abs(fit.X_train.col(col).dot(resid)) < 1e-8);
  CHECK_FALSE(refit.rank_deficient);

  // square nonsingular noiseless system is recovered exactly
  Rng rng(17);
  Eigen::MatrixXd X(6, 6);
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 6; ++c) X(r, c) = rng.gaussian();
  Eigen::VectorXd truth(6);
  truth << 1, -2, 0.5, 3, -1, 0.25;
  OlsRefit exact = ols_refit(X, X * truth, {0, 1, 2, 3, 4, 5});
  CHECK((exact.coefficients - truth).cwiseAbs().maxCoeff() < 1e-9);

  // duplicated column forces the minimum-norm fallback
  Eigen::MatrixXd Xdup(6, 2);
  Xdup.col(0) = X.col(0);
  Xdup.col(1) = X.col(0);
  OlsRefit dup = ols_refit(Xdup, X * truth, {0, 1});
  CHECK(dup.rank_deficient);
  CHECK(std::abs(dup.coefficients[0] - dup.coefficients[1]) < 1e-9);
}

TEST_CASE("non-negative garrote endpoints and oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    oracles::Instance inst = oracles::random_instance(40, 5, 1234 + seed, 0.3);
    GarrotePath g = nonnegative_garrote(inst.X, inst.y, 51);
    REQUIRE(g.lambdas.size() == 51);
    CHECK(g.lambdas.front() == 0.0);
    CHECK((g.shrink.front() - Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() <
          1e-9);
    CHECK(g.shrink.back().cwiseAbs().maxCoeff() < 1e-9);
    for (const auto& d : g.shrink) CHECK(d.minCoeff() >= 0.0);
    // implied coefficients are the scaled OLS estimate
    CHECK((g.coefficients.front() - g.theta_ols).cwiseAbs().maxCoeff() < 1e-9);
  }

  // two-variable instances against the brute-force grid
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    oracles::Instance inst = oracles::random_instance(60, 2, 888 + seed, 0.4);
    GarrotePath g = nonnegative_garrote(inst.X, inst.y, 21);
    Eigen::MatrixXd Z = inst.X * g.theta_ols.asDiagonal();
    for (std::size_t li : {std::size_t{0}, g.lambdas.size() / 2,
                           g.lambdas.size() - 1}) {
      Eigen::Vector2d brute = oracles::brute_force_garrote(
          Z, inst.y, g.lambdas[li], 3.0, 1e-3);
      CHECK(std::abs(g.shrink[li][0] - brute[0]) <= 2e-3);
      CHECK(std::abs(g.shrink[li][1] - brute[1]) <= 2e-3);
    }
  }

  // the OLS stage must exist
  Eigen::MatrixXd thin = Eigen::MatrixXd::Random(3, 5);
  CHECK_THROWS_AS(nonnegative_garrote(thin, Eigen::VectorXd::Zero(3)),
                  RankDeficientError);
  Eigen::MatrixXd collinear(10, 2);
  collinear.col(0) = Eigen::VectorXd::LinSpaced(10, 0, 1);
  collinear.col(1) = 2.0 * collinear.col(0);
  CHECK_THROWS_AS(nonnegative_garrote(collinear, Eigen::VectorXd::Zero(10)),
                  RankDeficientError);
}

TEST_CASE("cross-validated lasso") {
  // noiseless single-variable data selects lambda near 0
  Rng rng(31);
  Eigen::MatrixXd X(30, 1);
  for (Eigen::Index r = 0; r < 30; ++r) X(r, 0) = rng.gaussian();
  Eigen::VectorXd y = 1.7 * X.col(0);
  CvLassoResult cv = cv_lasso(X, y, 5, 42);
  CHECK(cv.lambda < 1e-8);
  CHECK(std::abs(cv.coefficients[0] - 1.7) < 1e-8);

  // pure-noise response stays within the path's support bound
  oracles::Instance noise = oracles::random_instance(40, 10, 2222, 5.0);
  Eigen::VectorXd pure(40);
  Rng nrng(77);
  for (Eigen::Index i = 0; i < 40; ++i) pure[i] = nrng.gaussian();
  CvLassoResult cvn = cv_lasso(noise.X, pure, 5, 7);
  std::size_t max_support = 0;
  LassoPath full = lars_lasso_path(noise.X, pure);
  for (const auto& s : full.supports) max_support = std::max(max_support, s.size());
  std::size_t selected = 0;
  for (Eigen::Index j = 0; j < cvn.coefficients.size(); ++j)
    if (cvn.coefficients[j] != 0.0) ++selected;
  CHECK(selected <= max_support);

  // determinism: same seed, same folds, same answer
  CvLassoResult a = cv_lasso(noise.X, pure, 5, 99);
  CvLassoResult b = cv_lasso(noise.X, pure, 5, 99);
  CHECK(a.lambda == b.lambda);
  CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.mean_cv_error == b.mean_cv_error);

  CHECK_THROWS_AS(cv_lasso(X, y, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(cv_lasso(X, y, 31, 0), std::invalid_argument);
}

TEST_CASE("path computed on unit-norm columns reports the classic scale") {
  PreparedFit fit = worked_fit();
  // lambda_max = n * max |x_norm^T y| / n = max |x_norm^T y|
  Eigen::MatrixXd Xn = fit.X_train;
  for (Eigen::Index j = 0; j < Xn.cols(); ++j)
    Xn.col(j) /= fit.npath.column_norms[j];
  double expect = (Xn.transpose() * fit.y_train).cwiseAbs().maxCoeff();
  CHECK(std::abs(fit.npath.path.lambdas.back() - expect) < 1e-10);
}
