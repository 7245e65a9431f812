#include "topolasso/simulate.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "topolasso/pipeline.hpp"
#include "topolasso/selection.hpp"

namespace topolasso {

void SimConfig::validate() const {
  if (p < 1 || p > Term::kMaxVariables)
    throw std::invalid_argument("SimConfig: bad p");
  if (k < 1 || k > p) throw std::invalid_argument("SimConfig: bad k");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("SimConfig: rho must lie in [0, 1)");
  if (sigma <= 0.0) throw std::invalid_argument("SimConfig: sigma must be > 0");
  if (n < 10) throw std::invalid_argument("SimConfig: n too small");
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) >
      1e-9)
    throw std::invalid_argument("SimConfig: splits must sum to 1");
  if (replications < 1)
    throw std::invalid_argument("SimConfig: replications must be >= 1");
  if (cv_folds < 2) throw std::invalid_argument("SimConfig: cv_folds < 2");
  if (mu_grid_size < 1) throw std::invalid_argument("SimConfig: mu grid empty");
}

namespace {

constexpr std::uint64_t kPresetCoefficientSeed = 0x70c01a5500c0effULL;

Eigen::VectorXd frozen_coefficients(std::size_t count, std::uint64_t stream) {
  Rng rng(mix_seed(kPresetCoefficientSeed, stream));
  Eigen::VectorXd c(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c[i] = 1.0 + static_cast<double>(rng.below(5));
  return c;
}

std::vector<Term> mains(int p) {
  std::vector<Term> out;
  for (int i = 1; i <= p; ++i) out.push_back(Term::from_indices({i}));
  return out;
}

void add_block_faces(std::vector<Term>& out, const std::vector<int>& block,
                     int max_degree) {
  const int m = static_cast<int>(block.size());
  for (int d = 2; d <= max_degree; ++d) {
    if (d > m) break;
    std::vector<int> c(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::vector<int> idx;
      for (int i : c) idx.push_back(block[static_cast<std::size_t>(i)]);
      out.push_back(Term::from_indices(idx));
      int i = d - 1;
      while (i >= 0 && c[static_cast<std::size_t>(i)] == m - d + i) --i;
      if (i < 0) break;
      ++c[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < d; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

std::vector<Term> first_triples(int p, std::size_t count) {
  ModelSupport all = enumerate_candidate_terms(p, 3);
  std::vector<Term> out;
  for (const Term& t : all)
    if (t.degree() == 3 && out.size() < count) out.push_back(t);
  return out;
}

ModelPreset make_model1() {
  // complete graph on 8 vertices with the first 11 triangles filled:
  // the filled triangles all share vertex 1, so each kills one of the
  // independent 1-cycles and the closure keeps beta = (1, 10, 0)
  std::vector<Term> terms = mains(8);
  add_block_faces(terms, {1, 2, 3, 4, 5, 6, 7, 8}, 2);
  for (const Term& t : first_triples(8, 11)) terms.push_back(t);
  ModelPreset m;
  m.name = "model1";
  m.support = ModelSupport(std::move(terms), 8);
  m.coefficients = frozen_coefficients(m.support.size(), 1);
  m.documented_betti = {1, 10, 0, 0, 0, 0};
  return m;
}

ModelPreset make_model2() {
  // two disjoint hollow tetrahedra {1-4} and {5-8}
  std::vector<Term> terms = mains(8);
  add_block_faces(terms, {1, 2, 3, 4}, 3);
  add_block_faces(terms, {5, 6, 7, 8}, 3);
  ModelPreset m;
  m.name = "model2";
  m.support = ModelSupport(std::move(terms), 8);
  m.coefficients = frozen_coefficients(m.support.size(), 2);
  m.documented_betti = {2, 0, 2, 0, 0, 0};
  return m;
}

ModelPreset make_model3() {
  // hollow tetrahedron {1-4} plus the edges {5,6} and {7,8}
  std::vector<Term> terms = mains(8);
  add_block_faces(terms, {1, 2, 3, 4}, 3);
  terms.push_back(Term::from_indices({5, 6}));
  terms.push_back(Term::from_indices({7, 8}));
  ModelPreset m;
  m.name = "model3";
  m.support = ModelSupport(std::move(terms), 8);
  m.coefficients = frozen_coefficients(m.support.size(), 3);
  m.documented_betti = {3, 0, 1, 0, 0, 0};
  return m;
}

ModelPreset make_model4() {
  // model2's 1-skeleton plus the first 16 triples; the cross-block triples
  // lack their edges, so the support is not hierarchical
  std::vector<Term> terms = mains(8);
  add_block_faces(terms, {1, 2, 3, 4}, 2);
  add_block_faces(terms, {5, 6, 7, 8}, 2);
  for (const Term& t : first_triples(8, 16)) terms.push_back(t);
  ModelPreset m;
  m.name = "model4";
  m.support = ModelSupport(std::move(terms), 8);
  m.coefficients = frozen_coefficients(m.support.size(), 4);
  return m;
}

}  // namespace

std::vector<ModelPreset> model_presets() {
  return {make_model1(), make_model2(), make_model3(), make_model4()};
}

const ModelPreset& preset_by_name(const std::string& name) {
  static const std::vector<ModelPreset> presets = model_presets();
  for (const ModelPreset& m : presets)
    if (m.name == name) return m;
  throw std::invalid_argument("unknown preset: " + name);
}

Eigen::MatrixXd gen_design(const SimConfig& cfg, int replication) {
  cfg.validate();
  Rng rng(mix_seed(mix_seed(cfg.seed, 0xD3516E),
                   static_cast<std::uint64_t>(replication)));
  Eigen::MatrixXd x(cfg.n, cfg.p);
  const double carry = cfg.rho;
  const double fresh = std::sqrt(1.0 - cfg.rho * cfg.rho);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double prev = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double z = rng.gaussian();
      double value = (j == 0) ? z : carry * prev + fresh * z;
      x(r, j) = value;
      prev = value;
    }
  }
  return x;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& design_columns,
                             const ModelSupport& candidate_terms,
                             const ModelPreset& preset, double sigma,
                             Rng& rng) {
  if (design_columns.cols() != static_cast<Eigen::Index>(candidate_terms.size()))
    throw std::invalid_argument("gen_response: column/term mismatch");
  Eigen::VectorXd theta =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(candidate_terms.size()));
  for (std::size_t i = 0; i < preset.support.size(); ++i) {
    int col = candidate_terms.index_of(preset.support[i]);
    if (col < 0)
      throw std::invalid_argument(
          "gen_response: preset term outside the candidate set");
    theta[col] = preset.coefficients[static_cast<Eigen::Index>(i)];
  }
  Eigen::VectorXd y = design_columns * theta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.gaussian();
  return y;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::CcAllCycles: return "cc-all";
    case Method::CcNoZeroCycles: return "cc-no0";
    case Method::CcHigherCycles: return "cc-higher";
    case Method::CcLowerCycles: return "cc-lower";
    case Method::LarsOls: return "lars-ols";
    case Method::Lasso: return "lasso";
    case Method::LassoCv: return "lasso-cv";
    case Method::Nng: return "nng";
    case Method::Maic: return "maic";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::CcAllCycles, Method::CcNoZeroCycles,
                   Method::CcHigherCycles, Method::CcLowerCycles,
                   Method::LarsOls, Method::Lasso, Method::LassoCv,
                   Method::Nng, Method::Maic}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + name);
}

namespace {

struct MethodOutcome {
  double model_error = 0.0;
  double support_size = 0.0;
};

struct RepResult {
  std::vector<std::optional<MethodOutcome>> outcomes;
  std::vector<std::string> failure_notes;
};

std::vector<double> mu_grid_of(int size) {
  if (size == 1) return {0.0};
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i)
    grid[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(size - 1);
  return grid;
}

Eigen::VectorXd betti_weights_for(Method m, int k) {
  switch (m) {
    case Method::CcAllCycles: return betti_weights_all_cycles(k);
    case Method::CcNoZeroCycles: return betti_weights_no_zero_cycles(k);
    case Method::CcHigherCycles: return betti_weights_higher_cycles(k);
    case Method::CcLowerCycles: return betti_weights_lower_cycles(k);
    default: break;
  }
  throw std::logic_error("betti_weights_for: not a CC method");
}

double support_size_of(const Eigen::VectorXd& theta) {
  int nz = 0;
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (theta[i] != 0.0) ++nz;
  return static_cast<double>(nz);
}

RepResult run_replication(const SimConfig& cfg, const ModelPreset& preset,
                          const std::vector<Method>& methods,
                          std::uint64_t cell_seed, int replication) {
  SimConfig local = cfg;
  local.seed = cell_seed;
  Eigen::MatrixXd raw = gen_design(local, replication);

  Dataset data;
  data.predictors = raw;
  data.split = contiguous_splits(raw.rows(), cfg.train_fraction,
                                 cfg.validation_fraction, cfg.test_fraction);
  data.response = Eigen::VectorXd::Zero(raw.rows());  // filled below

  ModelSupport terms = enumerate_candidate_terms(cfg.p, cfg.k);
  DesignMatrix design = build_design(data, terms, cfg.scheme);

  Rng noise(mix_seed(mix_seed(cell_seed, 0x4015E),
                     static_cast<std::uint64_t>(replication)));
  data.response =
      gen_response(design.columns, terms, preset, cfg.sigma, noise);

  std::vector<Eigen::Index> tr = data.rows_with(Dataset::Split::Train);
  std::vector<Eigen::Index> va = data.rows_with(Dataset::Split::Validation);
  auto take_rows = [&design](const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        design.columns.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = design.columns.row(rows[i]);
    return out;
  };
  Eigen::MatrixXd X_tr = take_rows(tr);
  Eigen::MatrixXd X_v = take_rows(va);
  Eigen::VectorXd y_tr(static_cast<Eigen::Index>(tr.size()));
  for (std::size_t i = 0; i < tr.size(); ++i)
    y_tr[static_cast<Eigen::Index>(i)] = data.response[tr[i]];
  Eigen::VectorXd y_v(static_cast<Eigen::Index>(va.size()));
  for (std::size_t i = 0; i < va.size(); ++i)
    y_v[static_cast<Eigen::Index>(i)] = data.response[va[i]];

  Eigen::VectorXd theta_true =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < preset.support.size(); ++i)
    theta_true[terms.index_of(preset.support[i])] =
        preset.coefficients[static_cast<Eigen::Index>(i)];

  Eigen::MatrixXd second_moment =
      X_v.transpose() * X_v / static_cast<double>(X_v.rows());

  NormalizedPath npath = normalized_lasso_path(X_tr, y_tr);

  PathContext ctx;
  ctx.terms = &terms;
  ctx.X_train = X_tr;
  ctx.y_train = y_tr;
  ctx.X_validation = X_v;
  ctx.y_validation = y_v;
  ctx.betti_length = cfg.k;
  ctx.oracle = OracleSpec{theta_true, second_moment};
  AnnotatedPath annotated = annotate_path(npath.path, ctx);

  const std::vector<double> mu_grid = mu_grid_of(cfg.mu_grid_size);

  RepResult result;
  result.outcomes.resize(methods.size());
  result.failure_notes.resize(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    Method m = methods[mi];
    try {
      Eigen::VectorXd theta_hat;
      double size = 0.0;
      switch (m) {
        case Method::CcAllCycles:
        case Method::CcNoZeroCycles:
        case Method::CcHigherCycles:
        case Method::CcLowerCycles: {
          CriterionConfig cc;
          cc.mu_grid = mu_grid;
          cc.betti_weights = betti_weights_for(m, cfg.k);
          cc.mode = ErrorMode::OracleModelError;
          SelectionReport rep = select_model(annotated, cc);
          theta_hat = rep.coefficients;
          size = static_cast<double>(rep.support.size());
          break;
        }
        case Method::LarsOls: {
          CriterionConfig cc;
          cc.mu_grid = {0.0};
          cc.betti_weights = betti_weights_all_cycles(cfg.k);
          cc.mode = ErrorMode::OracleModelError;
          SelectionReport rep = select_model(annotated, cc);
          theta_hat = rep.coefficients;
          size = static_cast<double>(rep.support.size());
          break;
        }
        case Method::Maic: {
          SelectionReport rep =
              maic(annotated, mu_grid, ErrorMode::OracleModelError);
          theta_hat = rep.coefficients;
          size = static_cast<double>(rep.support.size());
          break;
        }
        case Method::Lasso: {
          // default rule: validation error over the path's own coefficients
          std::size_t best = 0;
          double best_err = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < npath.path.breakpoints(); ++i) {
            double err =
                (y_v - X_v * npath.path.coefficients[i]).squaredNorm();
            if (err <= best_err + 1e-12) {
              best = i;  // ties keep the larger lambda
              best_err = std::min(best_err, err);
            }
          }
          theta_hat = npath.path.coefficients[best];
          size = support_size_of(theta_hat);
          break;
        }
        case Method::LassoCv: {
          Eigen::MatrixXd Xn = X_tr;
          for (Eigen::Index j = 0; j < Xn.cols(); ++j)
            Xn.col(j) /= npath.column_norms[j];
          CvLassoResult cv =
              cv_lasso(Xn, y_tr, cfg.cv_folds,
                       mix_seed(cell_seed, 0xCF00 + static_cast<std::uint64_t>(
                                               replication)));
          theta_hat = cv.coefficients.cwiseQuotient(npath.column_norms);
          size = support_size_of(theta_hat);
          break;
        }
        case Method::Nng: {
          GarrotePath garrote =
              nonnegative_garrote(X_tr, y_tr, cfg.nng_grid_size);
          std::size_t best = 0;
          double best_err = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < garrote.lambdas.size(); ++i) {
            double err =
                (y_v - X_v * garrote.coefficients[i]).squaredNorm();
            if (err <= best_err + 1e-12) {
              best = i;
              best_err = std::min(best_err, err);
            }
          }
          theta_hat = garrote.coefficients[best];
          size = support_size_of(garrote.shrink[best]);
          break;
        }
      }
      MethodOutcome outcome;
      outcome.model_error = model_error(theta_hat, theta_true, second_moment);
      outcome.support_size = size;
      result.outcomes[mi] = outcome;
    } catch (const std::exception& e) {
      result.failure_notes[mi] = e.what();
    }
  }
  return result;
}

MethodStats aggregate(const std::vector<RepResult>& reps, std::size_t mi) {
  MethodStats s;
  std::vector<double> mes, sizes;
  for (const RepResult& r : reps) {
    if (r.outcomes[mi].has_value()) {
      mes.push_back(r.outcomes[mi]->model_error);
      sizes.push_back(r.outcomes[mi]->support_size);
    } else {
      ++s.failures;
    }
  }
  s.completed = static_cast<int>(mes.size());
  auto mean_sd = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair<double, double>{0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = (v.size() > 1)
                    ? std::sqrt(ss / static_cast<double>(v.size() - 1))
                    : 0.0;
    return std::pair<double, double>{mean, sd};
  };
  std::tie(s.me_mean, s.me_sd) = mean_sd(mes);
  std::tie(s.size_mean, s.size_sd) = mean_sd(sizes);
  return s;
}

}  // namespace

ExperimentReport run_experiment(const SimConfig& cfg, const ModelPreset& preset,
                                const std::vector<Method>& methods,
                                const std::vector<double>& sigmas,
                                const std::vector<double>& rhos, int jobs) {
  cfg.validate();
  if (methods.empty())
    throw std::invalid_argument("run_experiment: no methods");
  if (sigmas.empty() || rhos.empty())
    throw std::invalid_argument("run_experiment: empty sigma/rho grid");
  jobs = std::max(jobs, 1);

  ExperimentReport report;
  report.config = cfg;
  report.preset = preset.name;
  report.methods = methods;

  std::uint64_t cell_index = 0;
  for (double rho : rhos) {
    for (double sigma : sigmas) {
      SimConfig cell_cfg = cfg;
      cell_cfg.sigma = sigma;
      cell_cfg.rho = rho;
      std::uint64_t cell_seed = mix_seed(cfg.seed, 0xCE11 + cell_index);
      ++cell_index;

      std::vector<RepResult> reps(
          static_cast<std::size_t>(cfg.replications));
      std::atomic<int> next{0};
      auto worker = [&]() {
        while (true) {
          int r = next.fetch_add(1);
          if (r >= cfg.replications) return;
          reps[static_cast<std::size_t>(r)] =
              run_replication(cell_cfg, preset, methods, cell_seed, r);
        }
      };
      if (jobs == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }

      ExperimentCell cell;
      cell.sigma = sigma;
      cell.rho = rho;
      for (std::size_t mi = 0; mi < methods.size(); ++mi)
        cell.stats.push_back(aggregate(reps, mi));
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace topolasso
