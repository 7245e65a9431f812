#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "topolasso/regression.hpp"
#include "topolasso/selection.hpp"
#include "topolasso/simulate.hpp"
#include "topolasso/terms.hpp"

namespace topolasso {

/// Input problems carry enough position info for a useful exit-2 message.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, long line, long column = -1)
      : std::runtime_error(std::move(message)), line_(line), column_(column) {}
  long line() const { return line_; }
  long column() const { return column_; }

 private:
  long line_, column_;
};

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// RFC-4180-subset CSV with a required header row; every body cell must be
/// numeric. Throws ParseError naming the offending row/column.
CsvTable read_csv(const std::string& path);

/// Splits a CSV into predictors and the named response column.
Dataset dataset_from_csv(const CsvTable& table, const std::string& response);

/// Term-list text: one term per line as 1-based indices separated by
/// spaces; '#' starts a comment. Returns terms and the largest index seen.
struct TermList {
  std::vector<Term> terms;
  int max_index = 0;
};
TermList read_term_list(const std::string& path);
TermList parse_term_list(const std::string& text);

/// key = value configuration text; '#' starts comments, blank lines skipped.
std::map<std::string, std::string> read_config(const std::string& path);
std::map<std::string, std::string> parse_config(const std::string& text);

/// FNV-1a digest of a file's bytes, as a 16-hex-digit string.
std::string file_digest(const std::string& path);

/// Writes via a temp file and rename so readers never see partial output.
void atomic_write_file(const std::string& path, const std::string& contents);

/// Provenance block embedded in every JSON report.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> options;
  std::map<std::string, std::string> input_digests;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC

  static std::string current_timestamp();
  nlohmann::json to_json() const;
};

nlohmann::json term_to_json(const Term& t);
nlohmann::json support_to_json(const ModelSupport& s);

nlohmann::json selection_report_to_json(const SelectionReport& report,
                                        const AnnotatedPath& annotated,
                                        const RunManifest& manifest);
nlohmann::json experiment_report_to_json(const ExperimentReport& report,
                                         const RunManifest& manifest);

}  // namespace topolasso
