#include "topolasso/pipeline.hpp"

#include <numeric>
#include <stdexcept>

#include "topolasso/random.hpp"

namespace topolasso {

NormalizedPath normalized_lasso_path(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y) {
  NormalizedPath out;
  out.column_norms = Eigen::VectorXd::Ones(X.cols());
  Eigen::MatrixXd Xn = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double norm = X.col(j).norm();
    if (norm > 1e-300) {
      out.column_norms[j] = norm;
      Xn.col(j) /= norm;
    }
  }
  out.path = lars_lasso_path(Xn, y);
  const double n = static_cast<double>(X.rows());
  for (double& lam : out.path.lambdas) lam *= n;
  for (Eigen::VectorXd& th : out.path.coefficients)
    th = th.cwiseQuotient(out.column_norms);
  return out;
}

namespace {

std::vector<Dataset::Split> split_tags(Eigen::Index n, double train,
                                       double validation, double test,
                                       const std::vector<Eigen::Index>& order) {
  if (train <= 0 || validation < 0 || test < 0 ||
      std::abs(train + validation + test - 1.0) > 1e-9)
    throw std::invalid_argument("splits must be nonnegative and sum to 1");
  auto n_train = static_cast<Eigen::Index>(std::floor(train * static_cast<double>(n)));
  auto n_val = static_cast<Eigen::Index>(std::floor(validation * static_cast<double>(n)));
  if (n_train < 2) throw std::invalid_argument("splits leave fewer than 2 training rows");
  std::vector<Dataset::Split> tags(static_cast<std::size_t>(n),
                                   Dataset::Split::Test);
  for (Eigen::Index i = 0; i < n; ++i) {
    Dataset::Split s = (i < n_train) ? Dataset::Split::Train
                       : (i < n_train + n_val) ? Dataset::Split::Validation
                                               : Dataset::Split::Test;
    tags[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = s;
  }
  return tags;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v,
                     const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

}  // namespace

std::vector<Dataset::Split> contiguous_splits(Eigen::Index n, double train,
                                              double validation, double test) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  return split_tags(n, train, validation, test, order);
}

std::vector<Dataset::Split> shuffled_splits(Eigen::Index n, double train,
                                            double validation, double test,
                                            std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(mix_seed(seed, 0x5117));
  deterministic_shuffle(order, rng);
  return split_tags(n, train, validation, test, order);
}

PreparedFit prepare_fit(const Dataset& data, int order,
                        InteractionScheme scheme, bool standardize_response) {
  PreparedFit fit;
  fit.terms = enumerate_candidate_terms(
      static_cast<int>(data.variable_count()), order);
  fit.design = build_design(data, fit.terms, scheme);

  std::vector<Eigen::Index> tr = data.rows_with(Dataset::Split::Train);
  std::vector<Eigen::Index> va = data.rows_with(Dataset::Split::Validation);
  std::vector<Eigen::Index> te = data.rows_with(Dataset::Split::Test);

  fit.X_train = take_rows(fit.design.columns, tr);
  fit.X_validation = take_rows(fit.design.columns, va);
  fit.X_test = take_rows(fit.design.columns, te);

  Eigen::VectorXd y_tr = take(data.response, tr);
  if (standardize_response)
    fit.response_scaler = fit_response_scaler(y_tr);
  fit.y_train = fit.response_scaler.transform(y_tr);
  fit.y_validation = fit.response_scaler.transform(take(data.response, va));
  fit.y_test = fit.response_scaler.transform(take(data.response, te));

  fit.npath = normalized_lasso_path(fit.X_train, fit.y_train);
  return fit;
}

}  // namespace topolasso
