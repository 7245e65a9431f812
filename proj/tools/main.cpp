#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "topolasso/version.hpp"

namespace {

std::uint64_t seed_fallback() {
  if (const char* env = std::getenv("TOPOLASSO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable TOPOLASSO_SEED\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-aware model selection for square-free hierarchical "
               "polynomial regression"};
  app.set_version_flag("--version", std::string(topolasso::kVersion));
  app.require_subcommand(1);

  topolasso::cli::BettiCommand betti;
  auto* betti_cmd = app.add_subcommand(
      "betti", "Hierarchical closure and Betti numbers of a term list");
  betti_cmd->add_option("termfile", betti.termfile, "term-list text file")
      ->required();
  betti_cmd->add_option("--out", betti.out_dir, "directory for the JSON report");

  topolasso::cli::PathCommand path;
  auto* path_cmd = app.add_subcommand(
      "path", "LASSO path with supports, closures and Betti numbers");
  path_cmd->add_option("csv", path.csv, "input CSV")->required();
  path_cmd->add_option("--response", path.response, "response column name")
      ->required();
  path_cmd->add_option("--order", path.order, "max interaction order")
      ->required();
  path_cmd->add_option("--interactions", path.interactions,
                       "interaction construction: raw | standardized");
  path_cmd->add_option("--out", path.out_dir, "directory for the JSON report");

  topolasso::cli::SelectCommand select;
  std::vector<double> splits;
  bool seed_given = false;
  auto* select_cmd =
      app.add_subcommand("select", "Model selection on CSV data");
  select_cmd->add_option("csv", select.csv, "input CSV")->required();
  select_cmd->add_option("--response", select.response, "response column name")
      ->required();
  select_cmd->add_option("--order", select.order, "max interaction order")
      ->required();
  select_cmd->add_option("--method", select.methods,
                         "methods: cc, cc-all, cc-no0, cc-higher, cc-lower, "
                         "lars-ols, lasso, lasso-cv, nng, maic")
      ->delimiter(',');
  select_cmd->add_option("--betti-weights", select.betti_weights,
                         "comma list A for --method cc");
  select_cmd->add_option("--mu-grid", select.mu_grid, "mu grid size");
  select_cmd->add_option("--splits", splits, "train,validation,test fractions")
      ->delimiter(',')
      ->expected(3);
  select_cmd->add_option("--cv-folds", select.cv_folds, "folds for lasso-cv");
  select_cmd->add_option("--nng-grid", select.nng_grid, "garrote grid size");
  select_cmd->add_option("--interactions", select.interactions,
                         "interaction construction: raw | standardized");
  select_cmd
      ->add_option("--seed", select.seed,
                   "split/CV seed (TOPOLASSO_SEED as fallback)")
      ->trigger_on_parse()
      ->each([&seed_given](const std::string&) { seed_given = true; });
  select_cmd->add_option("--out", select.out_dir,
                         "directory for the JSON reports");

  topolasso::cli::SimulateCommand simulate;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Run a synthetic-data experiment");
  sim_cmd->add_option("config", simulate.config, "key = value config file")
      ->required();
  sim_cmd->add_option("--jobs", simulate.jobs, "parallel replications");
  sim_cmd->add_option("--out", simulate.out_dir,
                      "directory for the experiment reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return topolasso::cli::kExitInputError;
  }

  if (betti_cmd->parsed())
    return topolasso::cli::run_betti(betti, std::cout, std::cerr);
  if (path_cmd->parsed())
    return topolasso::cli::run_path(path, std::cout, std::cerr);
  if (select_cmd->parsed()) {
    if (!seed_given) select.seed = seed_fallback();
    if (splits.size() == 3) {
      select.train = splits[0];
      select.validation = splits[1];
      select.test = splits[2];
    }
    return topolasso::cli::run_select(select, std::cout, std::cerr);
  }
  if (sim_cmd->parsed())
    return topolasso::cli::run_simulate(simulate, std::cout, std::cerr);
  return topolasso::cli::kExitInputError;
}
