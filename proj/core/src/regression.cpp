#include "topolasso/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "topolasso/random.hpp"

namespace topolasso {

namespace {

constexpr double kBreakpointDedup = 1e-10;
constexpr double kTiny = 1e-12;

double sample_sd(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  double mean = v.mean();
  double ss = (v.array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<int> nonzero_indices(const Eigen::VectorXd& v) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

std::vector<Eigen::Index> Dataset::rows_with(Split s) const {
  std::vector<Eigen::Index> out;
  if (split.empty()) {
    if (s == Split::Train) {
      out.resize(static_cast<std::size_t>(rows()));
      std::iota(out.begin(), out.end(), Eigen::Index{0});
    }
    return out;
  }
  for (Eigen::Index i = 0; i < rows(); ++i)
    if (split[static_cast<std::size_t>(i)] == s) out.push_back(i);
  return out;
}

void Dataset::validate() const {
  if (rows() < 2) throw std::invalid_argument("Dataset: need at least 2 rows");
  if (response.size() != rows())
    throw std::invalid_argument("Dataset: response length mismatch");
  if (!predictors.allFinite() || !response.allFinite())
    throw std::invalid_argument("Dataset: non-finite values");
  if (!split.empty() && split.size() != static_cast<std::size_t>(rows()))
    throw std::invalid_argument("Dataset: split tag count mismatch");
}

DesignMatrix build_design(const Dataset& data, const ModelSupport& terms,
                          InteractionScheme scheme) {
  data.validate();
  const Eigen::Index p = data.variable_count();
  if (terms.variable_count() > p)
    throw std::invalid_argument("build_design: terms exceed predictor count");

  const std::vector<Eigen::Index> train = data.rows_with(Dataset::Split::Train);
  if (train.size() < 2)
    throw std::invalid_argument("build_design: need at least 2 training rows");

  DesignMatrix d;
  d.terms = terms;
  d.scheme = scheme;
  d.main_mean = Eigen::VectorXd::Zero(p);
  d.main_sd = Eigen::VectorXd::Ones(p);

  Eigen::MatrixXd raw_train(static_cast<Eigen::Index>(train.size()), p);
  for (std::size_t r = 0; r < train.size(); ++r)
    raw_train.row(static_cast<Eigen::Index>(r)) = data.predictors.row(train[r]);

  std::vector<bool> used(static_cast<std::size_t>(p), false);
  for (const Term& t : terms)
    for (int idx : t.indices()) used[static_cast<std::size_t>(idx - 1)] = true;

  for (Eigen::Index v = 0; v < p; ++v) {
    if (!used[static_cast<std::size_t>(v)]) continue;
    d.main_mean[v] = raw_train.col(v).mean();
    double sd = sample_sd(raw_train.col(v));
    if (sd < 1e-12)
      throw DegenerateColumnError(
          static_cast<int>(v) + 1,
          "build_design: variable x" + std::to_string(v + 1) +
              " has zero variance on the training split");
    d.main_sd[v] = sd;
  }

  // interaction centers come from the raw training rows
  const Eigen::Index T = static_cast<Eigen::Index>(terms.size());
  d.column_center = Eigen::VectorXd::Zero(T);
  Eigen::MatrixXd train_cols(raw_train.rows(), T);
  for (Eigen::Index j = 0; j < T; ++j) {
    const Term& t = terms[static_cast<std::size_t>(j)];
    Eigen::VectorXd col = Eigen::VectorXd::Ones(raw_train.rows());
    for (int idx : t.indices()) {
      Eigen::Index v = idx - 1;
      if (t.degree() == 1 || scheme == InteractionScheme::StandardizedMainProductCentered)
        col.array() *= (raw_train.col(v).array() - d.main_mean[v]) / d.main_sd[v];
      else
        col.array() *= raw_train.col(v).array();
    }
    if (t.degree() >= 2) d.column_center[j] = col.mean();
    train_cols.col(j) = col.array() - d.column_center[j];
  }
  (void)train_cols;  // statistics now fixed; full matrix built via transform

  d.columns = d.transform(data.predictors);
  return d;
}

Eigen::MatrixXd DesignMatrix::transform(const Eigen::MatrixXd& raw) const {
  const Eigen::Index T = static_cast<Eigen::Index>(terms.size());
  Eigen::MatrixXd out(raw.rows(), T);
  for (Eigen::Index j = 0; j < T; ++j) {
    const Term& t = terms[static_cast<std::size_t>(j)];
    Eigen::VectorXd col = Eigen::VectorXd::Ones(raw.rows());
    for (int idx : t.indices()) {
      Eigen::Index v = idx - 1;
      if (t.degree() == 1 || scheme == InteractionScheme::StandardizedMainProductCentered)
        col.array() *= (raw.col(v).array() - main_mean[v]) / main_sd[v];
      else
        col.array() *= raw.col(v).array();
    }
    out.col(j) = col.array() - column_center[j];
  }
  return out;
}

ResponseScaler fit_response_scaler(const Eigen::VectorXd& y_train) {
  ResponseScaler s;
  s.mean = y_train.mean();
  double sd = sample_sd(y_train);
  s.sd = (sd < 1e-15) ? 1.0 : sd;
  return s;
}

LassoPath lars_lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("lars_lasso_path: non-finite input");
  if (X.rows() != y.size())
    throw std::invalid_argument("lars_lasso_path: row count mismatch");
  if (X.rows() < 2)
    throw std::invalid_argument("lars_lasso_path: need n >= 2");

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd c = X.transpose() * y * inv_n;
  double lambda = (p > 0) ? c.cwiseAbs().maxCoeff() : 0.0;
  const double lambda_floor = std::max(1e-14, 1e-13 * lambda);

  // recorded in descending lambda order, deduped at the end
  std::vector<double> rec_lambda;
  std::vector<Eigen::VectorXd> rec_theta;
  auto record = [&](double lam, const Eigen::VectorXd& th) {
    Eigen::VectorXd snapped = th;
    double scale = 1.0 + snapped.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < p; ++j)
      if (std::abs(snapped[j]) < kTiny * scale) snapped[j] = 0.0;
    rec_lambda.push_back(lam);
    rec_theta.push_back(std::move(snapped));
  };

  record(std::max(lambda, 0.0), theta);

  std::vector<int> active;
  std::vector<char> in_active(static_cast<std::size_t>(p), 0);
  std::set<int> blacklist;     // collinear with the current active set
  std::set<int> just_dropped;  // suppressed until lambda moves on

  auto gram_direction = [&](Eigen::VectorXd& w) -> bool {
    // w solves (X_A^T X_A / n) w = sign(c_A); false when numerically singular
    const std::size_t k = active.size();
    Eigen::MatrixXd G(k, k);
    Eigen::VectorXd s(static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      s[static_cast<Eigen::Index>(a)] = (c[active[a]] >= 0) ? 1.0 : -1.0;
      for (std::size_t b = a; b < k; ++b) {
        double g = X.col(active[a]).dot(X.col(active[b])) * inv_n;
        G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
        G(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = g;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success) return false;
    // reciprocal condition separates exact collinearity (~1e-16) from the
    // merely ill-conditioned Grams near |A| = n, which are still solvable
    if (!(ldlt.rcond() > 1e-13)) return false;
    w = ldlt.solve(s);
    return true;
  };

  if (lambda <= lambda_floor) {
    LassoPath path;
    path.lambdas = {0.0};
    path.coefficients = {Eigen::VectorXd::Zero(p)};
    path.supports = {{}};
    return path;
  }

  // seed with the most correlated column (lowest index on ties)
  {
    int best = 0;
    for (Eigen::Index j = 1; j < p; ++j)
      if (std::abs(c[j]) > std::abs(c[best]) + kTiny) best = static_cast<int>(j);
    active.push_back(best);
    in_active[static_cast<std::size_t>(best)] = 1;
  }

  const long max_iter = 50 + 8 * static_cast<long>(p) * 4;
  long iter = 0;
  while (lambda > lambda_floor) {
    if (++iter > max_iter)
      throw std::runtime_error("lars_lasso_path: event loop did not terminate");

    if (active.empty()) {
      // stalled: re-seed from the current residual
      int best = -1;
      for (Eigen::Index j = 0; j < p; ++j)
        if (best < 0 || std::abs(c[j]) > std::abs(c[best]) + kTiny)
          best = static_cast<int>(j);
      active.push_back(best);
      in_active[static_cast<std::size_t>(best)] = 1;
      blacklist.clear();
    }

    Eigen::VectorXd w;
    if (!gram_direction(w)) {
      // the newest variable made the Gram singular; reject it
      int last = active.back();
      active.pop_back();
      in_active[static_cast<std::size_t>(last)] = 0;
      blacklist.insert(last);
      continue;
    }

    // correlation drift per unit decrease of lambda
    Eigen::VectorXd xa_w = Eigen::VectorXd::Zero(n);
    for (std::size_t a = 0; a < active.size(); ++a)
      xa_w += X.col(active[a]) * w[static_cast<Eigen::Index>(a)];
    Eigen::VectorXd drift = X.transpose() * xa_w * inv_n;

    const double tie = kTiny * (1.0 + lambda);
    double gamma_best = lambda;  // run to lambda = 0 if nothing intervenes
    int enter_col = -1;
    int drop_pos = -1;

    for (Eigen::Index j = 0; j < p; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      int jj = static_cast<int>(j);
      if (blacklist.count(jj)) continue;
      // a variable dropped at this breakpoint may re-enter later in the
      // interval, but a zero-length re-entry is floating-point noise
      bool dropped_here = just_dropped.count(jj) > 0;
      for (int side = 0; side < 2; ++side) {
        double den = (side == 0) ? 1.0 - drift[j] : 1.0 + drift[j];
        if (den <= kTiny) continue;  // no forward crossing on this side
        double num = (side == 0) ? lambda - c[j] : lambda + c[j];
        double gamma = num / den;
        if (gamma < -tie || gamma > gamma_best + tie) continue;
        if (dropped_here && gamma <= tie) continue;
        gamma = std::max(gamma, 0.0);
        if (gamma < gamma_best - tie) {
          gamma_best = gamma;
          enter_col = jj;
        } else if (enter_col < 0 || jj < enter_col) {
          // coincident entering events break toward the lowest column index
          gamma_best = std::min(gamma_best, gamma);
          enter_col = jj;
        }
      }
    }
    // drops win over entries at coincident gamma
    for (std::size_t a = 0; a < active.size(); ++a) {
      double wa = w[static_cast<Eigen::Index>(a)];
      if (wa == 0.0) continue;
      double gamma = -theta[active[a]] / wa;
      if (gamma <= 1e-14 || gamma > gamma_best + tie) continue;
      if (gamma < gamma_best - tie || drop_pos < 0) {
        gamma_best = std::min(gamma_best, std::max(gamma, 0.0));
        drop_pos = static_cast<int>(a);
        enter_col = -1;
      }
    }

    // advance
    for (std::size_t a = 0; a < active.size(); ++a)
      theta[active[a]] += gamma_best * w[static_cast<Eigen::Index>(a)];
    lambda = std::max(lambda - gamma_best, 0.0);
    just_dropped.clear();

    if (drop_pos >= 0) theta[active[static_cast<std::size_t>(drop_pos)]] = 0.0;

    c = X.transpose() * (y - X * theta) * inv_n;

    if (lambda <= lambda_floor) {
      lambda = 0.0;
      record(0.0, theta);
      break;
    }
    record(lambda, theta);

    if (drop_pos >= 0) {
      int col = active[static_cast<std::size_t>(drop_pos)];
      active.erase(active.begin() + drop_pos);
      in_active[static_cast<std::size_t>(col)] = 0;
      just_dropped.insert(col);
      blacklist.clear();
    } else if (enter_col >= 0) {
      active.push_back(enter_col);
      in_active[static_cast<std::size_t>(enter_col)] = 1;
      blacklist.clear();
    }
  }
  if (rec_lambda.back() > 0.0) {  // lambda hit the floor exactly at an event
    record(0.0, theta);
  }

  // collapse coincident breakpoints, keeping the latest state at each lambda
  LassoPath path;
  for (std::size_t i = 0; i < rec_lambda.size(); ++i) {
    if (!path.lambdas.empty() &&
        std::abs(path.lambdas.back() - rec_lambda[i]) <= kBreakpointDedup) {
      path.coefficients.back() = rec_theta[i];
    } else {
      path.lambdas.push_back(rec_lambda[i]);
      path.coefficients.push_back(rec_theta[i]);
    }
  }
  std::reverse(path.lambdas.begin(), path.lambdas.end());
  std::reverse(path.coefficients.begin(), path.coefficients.end());
  // dedup can leave a residual epsilon on the terminal breakpoint
  if (!path.lambdas.empty() && path.lambdas.front() <= kBreakpointDedup)
    path.lambdas.front() = 0.0;
  path.supports.reserve(path.lambdas.size());
  for (const auto& th : path.coefficients)
    path.supports.push_back(nonzero_indices(th));
  return path;
}

Eigen::VectorXd coefficients_at(const LassoPath& path, double lambda) {
  if (lambda < 0)
    throw std::invalid_argument("coefficients_at: lambda must be >= 0");
  if (path.lambdas.empty()) return Eigen::VectorXd();
  const auto& L = path.lambdas;
  if (lambda >= L.back())
    return Eigen::VectorXd::Zero(path.coefficients.back().size());
  auto it = std::lower_bound(L.begin(), L.end(), lambda);
  std::size_t hi = static_cast<std::size_t>(it - L.begin());
  if (hi < L.size() && std::abs(L[hi] - lambda) <= 1e-12 * (1.0 + lambda))
    return path.coefficients[hi];
  // lambda lies strictly inside (L[hi-1], L[hi])
  std::size_t lo = hi - 1;
  double t = (lambda - L[lo]) / (L[hi] - L[lo]);
  return (1.0 - t) * path.coefficients[lo] + t * path.coefficients[hi];
}

OlsRefit ols_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<int>& support) {
  OlsRefit out;
  out.coefficients = Eigen::VectorXd::Zero(X.cols());
  if (support.empty()) return out;
  Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    int col = support[i];
    if (col < 0 || col >= X.cols())
      throw std::invalid_argument("ols_refit: support index out of range");
    Xs.col(static_cast<Eigen::Index>(i)) = X.col(col);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Xs);
  Eigen::VectorXd beta = cod.solve(y);
  out.rank_deficient = cod.rank() < Xs.cols();
  for (std::size_t i = 0; i < support.size(); ++i)
    out.coefficients[support[i]] = beta[static_cast<Eigen::Index>(i)];
  return out;
}

GarrotePath nonnegative_garrote(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y, int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument("nonnegative_garrote: grid_size < 2");
  const Eigen::Index n = X.rows();
  const Eigen::Index T = X.cols();
  if (n <= T)
    throw RankDeficientError(
        "nonnegative_garrote: OLS stage needs more rows than columns");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  if (cod.rank() < T)
    throw RankDeficientError(
        "nonnegative_garrote: design is rank deficient; OLS stage undefined");

  GarrotePath out;
  out.theta_ols = cod.solve(y);
  Eigen::MatrixXd Z = X * out.theta_ols.asDiagonal();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd g = (Z.transpose() * Z).diagonal() * inv_n;
  Eigen::VectorXd zy = Z.transpose() * y * inv_n;
  double lambda_max = std::max(zy.maxCoeff(), 0.0);

  out.lambdas.resize(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i)
    out.lambdas[static_cast<std::size_t>(i)] =
        lambda_max * static_cast<double>(i) / static_cast<double>(grid_size - 1);

  // solve descending with warm starts, report ascending
  std::vector<Eigen::VectorXd> shrink(static_cast<std::size_t>(grid_size));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(T);
  Eigen::VectorXd fit = Eigen::VectorXd::Zero(n);  // Z d
  for (int gi = grid_size - 1; gi >= 0; --gi) {
    double lambda = out.lambdas[static_cast<std::size_t>(gi)];
    if (lambda == 0.0) {
      // unconstrained optimum is d = 1 (the OLS fit), which is feasible
      d = Eigen::VectorXd::Ones(T);
      fit = Z * d;
    } else {
      for (int sweep = 0; sweep < 100000; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < T; ++j) {
          if (g[j] < 1e-300) {
            if (d[j] != 0.0) {
              d[j] = 0.0;
            }
            continue;
          }
          double rho = Z.col(j).dot(y - fit) * inv_n + g[j] * d[j];
          double nd = std::max(0.0, (rho - lambda) / g[j]);
          double delta = nd - d[j];
          if (delta != 0.0) {
            fit += Z.col(j) * delta;
            d[j] = nd;
            max_change = std::max(max_change, std::abs(delta));
          }
        }
        if (max_change <= 1e-12 * (1.0 + d.cwiseAbs().maxCoeff())) break;
      }
    }
    shrink[static_cast<std::size_t>(gi)] = d;
  }
  out.shrink = std::move(shrink);
  out.coefficients.reserve(out.shrink.size());
  for (const auto& dv : out.shrink)
    out.coefficients.push_back(dv.cwiseProduct(out.theta_ols));
  return out;
}

CvLassoResult cv_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       int folds, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  if (folds < 2) throw std::invalid_argument("cv_lasso: folds must be >= 2");
  if (n < folds)
    throw std::invalid_argument("cv_lasso: more folds than observations");

  LassoPath full = lars_lasso_path(X, y);
  CvLassoResult result;
  result.lambda_grid = full.lambdas;
  result.mean_cv_error.assign(full.lambdas.size(), 0.0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(mix_seed(seed, 0x5cf5));
  deterministic_shuffle(order, rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i)
    fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i) % folds;

  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> in_rows, out_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == f)
        out_rows.push_back(i);
      else
        in_rows.push_back(i);
    }
    Eigen::MatrixXd Xi(static_cast<Eigen::Index>(in_rows.size()), X.cols());
    Eigen::VectorXd yi(static_cast<Eigen::Index>(in_rows.size()));
    for (std::size_t i = 0; i < in_rows.size(); ++i) {
      Xi.row(static_cast<Eigen::Index>(i)) = X.row(in_rows[i]);
      yi[static_cast<Eigen::Index>(i)] = y[in_rows[i]];
    }
    LassoPath fold_path = lars_lasso_path(Xi, yi);
    for (std::size_t li = 0; li < full.lambdas.size(); ++li) {
      Eigen::VectorXd th = coefficients_at(fold_path, full.lambdas[li]);
      for (Eigen::Index r : out_rows) {
        double pred = X.row(r).dot(th);
        double e = y[r] - pred;
        result.mean_cv_error[li] += e * e;
      }
    }
  }
  for (double& e : result.mean_cv_error) e /= static_cast<double>(n);

  // minimize; ties prefer the larger lambda (sparser model)
  std::size_t best = 0;
  for (std::size_t li = 1; li < result.mean_cv_error.size(); ++li)
    if (result.mean_cv_error[li] <= result.mean_cv_error[best] + 1e-12)
      best = li;
  result.lambda = full.lambdas[best];
  result.coefficients = full.coefficients[best];
  return result;
}

}  // namespace topolasso
