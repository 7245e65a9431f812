#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace topolasso::cli {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitMethodError = 3;

struct BettiCommand {
  std::string termfile;
  std::string out_dir;  // empty: no JSON written
};
int run_betti(const BettiCommand& cmd, std::ostream& out, std::ostream& err);

struct PathCommand {
  std::string csv;
  std::string response;
  int order = 2;
  std::string interactions = "raw";  // raw | standardized
  std::string out_dir;
};
int run_path(const PathCommand& cmd, std::ostream& out, std::ostream& err);

struct SelectCommand {
  std::string csv;
  std::string response;
  int order = 2;
  std::vector<std::string> methods;  // cc-all, cc-no0, ..., lars-ols, lasso,
                                     // lasso-cv, nng, maic, cc (custom A)
  std::string betti_weights;         // comma list for the custom cc method
  int mu_grid = 101;
  double train = 0.6, validation = 0.2, test = 0.2;
  std::uint64_t seed = 0;
  int cv_folds = 5;
  int nng_grid = 101;
  std::string interactions = "raw";
  std::string out_dir;
};
int run_select(const SelectCommand& cmd, std::ostream& out, std::ostream& err);

struct SimulateCommand {
  std::string config;
  int jobs = 1;
  std::string out_dir;
};
int run_simulate(const SimulateCommand& cmd, std::ostream& out,
                 std::ostream& err);

}  // namespace topolasso::cli
