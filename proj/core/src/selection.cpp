#include "topolasso/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topolasso {

namespace {

constexpr double kTieEps = 1e-12;

Eigen::VectorXd step_weights(int length, int first_active, int last_active) {
  if (length < 1) throw std::invalid_argument("betti weights: empty vector");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(length);
  for (int i = std::max(first_active, 0);
       i <= std::min(last_active, length - 1); ++i)
    a[i] = 1.0;
  return a;
}

// shared normalized-surface builder for CC and MAIC
CriterionSurface build_surface(const std::vector<double>& lambdas,
                               const std::vector<double>& errors,
                               const std::vector<double>& scores,
                               const std::vector<double>& mu_grid) {
  CriterionSurface s;
  s.lambdas = lambdas;
  s.mus = mu_grid;
  double max_err = 0.0, max_score = 0.0;
  for (double e : errors) max_err = std::max(max_err, e);
  for (double v : scores) max_score = std::max(max_score, v);
  s.topology_degenerate = (max_score <= 0.0);
  const auto nl = static_cast<Eigen::Index>(lambdas.size());
  const auto nm = static_cast<Eigen::Index>(mu_grid.size());
  s.values.resize(nl, nm);
  for (Eigen::Index i = 0; i < nl; ++i) {
    double e = (max_err > 0.0) ? errors[static_cast<std::size_t>(i)] / max_err : 0.0;
    double b = s.topology_degenerate
                   ? 0.0
                   : scores[static_cast<std::size_t>(i)] / max_score;
    for (Eigen::Index m = 0; m < nm; ++m) {
      double mu = mu_grid[static_cast<std::size_t>(m)];
      s.values(i, m) = (1.0 - mu) * e + mu * b;
    }
  }
  return s;
}

struct SurfaceArgmin {
  std::size_t lambda_index = 0;
  std::size_t mu_index = 0;
};

// per-mu criterion argmin over lambda; ties prefer the larger lambda
std::vector<std::size_t> per_mu_argmin(const CriterionSurface& s) {
  std::vector<std::size_t> out(s.mus.size(), 0);
  for (std::size_t m = 0; m < s.mus.size(); ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
      double v = s.values(static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(m));
      if (v <= best + kTieEps) {  // lambdas ascend: ties move up in lambda
        best = std::min(best, v);
        out[m] = i;
      }
    }
  }
  return out;
}

// stage-3 arbitration metric for a usable breakpoint
double arbitration_error(const AnnotatedBreakpoint& bp, ErrorMode mode) {
  if (mode == ErrorMode::OracleModelError) return bp.model_error;
  if (std::isfinite(bp.test_error)) return bp.test_error;
  return bp.validation_error;
}

// stage 3: among the per-mu candidates, take the one with the smallest
// held-out error; ties prefer the larger lambda, then the smaller mu
SurfaceArgmin final_stage(const CriterionSurface& s,
                          const std::vector<std::size_t>& candidates,
                          const AnnotatedPath& a,
                          const std::vector<std::size_t>& usable,
                          ErrorMode mode) {
  SurfaceArgmin best;
  double best_error = std::numeric_limits<double>::infinity();
  double best_lambda = -1.0;
  bool have = false;
  for (std::size_t m = 0; m < candidates.size(); ++m) {
    std::size_t li = candidates[m];
    double err = arbitration_error(a.breakpoints[usable[li]], mode);
    if (!std::isfinite(err))
      throw std::runtime_error("selection: missing arbitration error");
    double lambda = s.lambdas[li];
    bool better = !have || err < best_error - kTieEps ||
                  (std::abs(err - best_error) <= kTieEps &&
                   lambda > best_lambda + kTieEps);
    if (better) {
      best.lambda_index = li;
      best.mu_index = m;
      best_error = std::min(best_error, err);
      best_lambda = lambda;
      have = true;
    }
  }
  return best;
}

std::vector<double> errors_for_mode(const AnnotatedPath& a, ErrorMode mode,
                                    const std::vector<std::size_t>& usable) {
  std::vector<double> errors;
  errors.reserve(usable.size());
  for (std::size_t i : usable) {
    const auto& bp = a.breakpoints[i];
    double e = (mode == ErrorMode::Validation) ? bp.validation_error
                                               : bp.model_error;
    if (!std::isfinite(e))
      throw std::runtime_error(
          "criterion: missing error value (oracle mode without oracle "
          "annotation?)");
    errors.push_back(e);
  }
  return errors;
}

std::vector<std::size_t> usable_indices(const AnnotatedPath& a) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < a.breakpoints.size(); ++i)
    if (a.breakpoints[i].usable) idx.push_back(i);
  return idx;
}

SelectionReport report_from(const AnnotatedPath& a, CriterionSurface surface,
                            const std::vector<std::size_t>& usable,
                            ErrorMode mode, const std::string& method) {
  SurfaceArgmin arg =
      final_stage(surface, per_mu_argmin(surface), a, usable, mode);
  const AnnotatedBreakpoint& bp = a.breakpoints[usable[arg.lambda_index]];
  SelectionReport r;
  r.lambda_star = bp.lambda;
  r.mu_star = surface.mus[arg.mu_index];
  r.support = bp.raw_terms;
  r.coefficients = bp.refit;
  r.surface = std::move(surface);
  r.method = method;
  return r;
}

}  // namespace

Eigen::VectorXd betti_weights_all_cycles(int length) {
  return step_weights(length, 0, length - 1);
}
Eigen::VectorXd betti_weights_no_zero_cycles(int length) {
  return step_weights(length, 1, length - 1);
}
Eigen::VectorXd betti_weights_higher_cycles(int length) {
  return step_weights(length, 2, length - 1);
}
Eigen::VectorXd betti_weights_lower_cycles(int length) {
  return step_weights(length, 0, 1);
}

std::vector<double> default_mu_grid() {
  std::vector<double> grid(101);
  for (int i = 0; i <= 100; ++i)
    grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / 100.0;
  return grid;
}

void CriterionConfig::validate(int betti_length) const {
  if (mu_grid.empty())
    throw std::invalid_argument("CriterionConfig: empty mu grid");
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (mu_grid[i] < 0.0 || mu_grid[i] > 1.0)
      throw std::invalid_argument("CriterionConfig: mu outside [0, 1]");
    if (i > 0 && mu_grid[i] <= mu_grid[i - 1])
      throw std::invalid_argument("CriterionConfig: mu grid not increasing");
  }
  if (betti_weights.size() != betti_length)
    throw std::invalid_argument(
        "CriterionConfig: betti_weights length must match the Betti vector");
  bool positive = false;
  for (Eigen::Index i = 0; i < betti_weights.size(); ++i) {
    if (betti_weights[i] < 0.0)
      throw std::invalid_argument("CriterionConfig: negative Betti weight");
    if (betti_weights[i] > 0.0) positive = true;
  }
  if (!positive)
    throw std::invalid_argument(
        "CriterionConfig: betti_weights needs a positive entry");
}

std::size_t AnnotatedPath::usable_count() const {
  std::size_t n = 0;
  for (const auto& bp : breakpoints)
    if (bp.usable) ++n;
  return n;
}

AnnotatedPath annotate_path(const LassoPath& path, const PathContext& ctx) {
  if (path.lambdas.empty())
    throw std::invalid_argument("annotate_path: empty path");
  if (ctx.terms == nullptr || ctx.betti_length < 1)
    throw std::invalid_argument("annotate_path: incomplete context");
  const ModelSupport& terms = *ctx.terms;

  AnnotatedPath out;
  out.betti_length = ctx.betti_length;
  out.breakpoints.reserve(path.breakpoints());

  for (std::size_t i = 0; i < path.breakpoints(); ++i) {
    AnnotatedBreakpoint bp;
    bp.lambda = path.lambdas[i];
    bp.support = path.supports[i];

    std::vector<Term> raw;
    raw.reserve(bp.support.size());
    for (int col : bp.support) raw.push_back(terms[static_cast<std::size_t>(col)]);
    bp.raw_terms = ModelSupport(std::move(raw), terms.variable_count());
    bp.closed_terms = hierarchical_closure(bp.raw_terms);

    // closure feeds topology only; the refit uses the raw support
    SimplicialComplex complex = to_simplicial_complex(bp.closed_terms);
    bp.betti = betti_numbers(complex, ctx.betti_length - 1).first;

    try {
      if (static_cast<Eigen::Index>(bp.support.size()) > ctx.X_train.rows())
        throw std::runtime_error(
            "refit needs at least as many training rows as support columns");
      OlsRefit refit = ols_refit(ctx.X_train, ctx.y_train, bp.support);
      bp.refit = refit.coefficients;
      bp.refit_rank_deficient = refit.rank_deficient;
      Eigen::VectorXd resid =
          ctx.y_validation - ctx.X_validation * bp.refit;
      bp.validation_error = resid.squaredNorm();
      if (ctx.oracle.has_value())
        bp.model_error = model_error(bp.refit, ctx.oracle->theta_true,
                                     ctx.oracle->second_moment);
    } catch (const std::exception& e) {
      bp.usable = false;
      bp.note = e.what();
      bp.refit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.size()));
    }
    out.breakpoints.push_back(std::move(bp));
  }
  return out;
}

CriterionSurface compound_criterion(const AnnotatedPath& a,
                                    const CriterionConfig& cfg) {
  cfg.validate(a.betti_length);
  std::vector<std::size_t> usable = usable_indices(a);
  if (usable.empty())
    throw std::runtime_error("compound_criterion: no usable breakpoints");

  std::vector<double> lambdas, scores;
  for (std::size_t i : usable) {
    const auto& bp = a.breakpoints[i];
    lambdas.push_back(bp.lambda);
    double s = 0.0;
    for (int d = 0; d < a.betti_length; ++d)
      s += cfg.betti_weights[d] *
           static_cast<double>(bp.betti[static_cast<std::size_t>(d)]);
    scores.push_back(s);
  }
  return build_surface(lambdas, errors_for_mode(a, cfg.mode, usable), scores,
                       cfg.mu_grid);
}

SelectionReport select_model(const AnnotatedPath& a,
                             const CriterionConfig& cfg) {
  std::vector<std::size_t> usable = usable_indices(a);
  if (usable.empty())
    throw std::runtime_error("select_model: no usable breakpoints");
  return report_from(a, compound_criterion(a, cfg), usable, cfg.mode, "cc");
}

CriterionSurface maic_criterion(const AnnotatedPath& a,
                                const std::vector<double>& mu_grid,
                                ErrorMode mode) {
  std::vector<std::size_t> usable = usable_indices(a);
  if (usable.empty())
    throw std::runtime_error("maic_criterion: no usable breakpoints");
  std::vector<double> lambdas, scores;
  for (std::size_t i : usable) {
    lambdas.push_back(a.breakpoints[i].lambda);
    scores.push_back(static_cast<double>(a.breakpoints[i].support.size()));
  }
  return build_surface(lambdas, errors_for_mode(a, mode, usable), scores,
                       mu_grid);
}

SelectionReport maic(const AnnotatedPath& a, const std::vector<double>& mu_grid,
                     ErrorMode mode) {
  std::vector<std::size_t> usable = usable_indices(a);
  if (usable.empty()) throw std::runtime_error("maic: no usable breakpoints");
  return report_from(a, maic_criterion(a, mu_grid, mode), usable, mode,
                     "maic");
}

double model_error(const Eigen::VectorXd& theta_hat,
                   const Eigen::VectorXd& theta_true,
                   const Eigen::MatrixXd& second_moment) {
  if (theta_hat.size() != theta_true.size() ||
      second_moment.rows() != theta_hat.size() ||
      second_moment.cols() != theta_hat.size())
    throw std::invalid_argument("model_error: dimension mismatch");
  Eigen::VectorXd delta = theta_hat - theta_true;
  double value = delta.dot(second_moment * delta);
  return std::max(value, 0.0);
}

}  // namespace topolasso
