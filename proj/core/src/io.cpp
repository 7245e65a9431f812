#include "topolasso/io.hpp"

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "topolasso/version.hpp"

namespace topolasso {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line, long lineno) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quote", lineno);
  out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  CsvTable table;
  std::string line;
  long lineno = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line, lineno);
    if (table.header.empty()) {
      for (auto& c : cells) table.header.push_back(trim(c));
      if (table.header.empty())
        throw ParseError("empty header row", lineno);
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) +
                           " cells, found " + std::to_string(cells.size()),
                       lineno);
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::string cell = trim(cells[c]);
      char* end = nullptr;
      errno = 0;
      double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || errno != 0)
        throw ParseError("non-numeric cell '" + cell + "' in column '" +
                             table.header[c] + "'",
                         lineno, static_cast<long>(c) + 1);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError("empty file", 0);
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return table;
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& response) {
  long rcol = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == response) rcol = static_cast<long>(c);
  if (rcol < 0)
    throw ParseError("response column '" + response + "' not found", 1);
  Dataset ds;
  ds.response = table.values.col(rcol);
  ds.predictors.resize(table.values.rows(), table.values.cols() - 1);
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
    if (c == rcol) continue;
    ds.predictors.col(out++) = table.values.col(c);
  }
  return ds;
}

TermList parse_term_list(const std::string& text) {
  TermList out;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::vector<int> indices;
    std::string tok;
    while (cells >> tok) {
      try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
        indices.push_back(v);
        out.max_index = std::max(out.max_index, v);
      } catch (const std::exception&) {
        throw ParseError("bad variable index '" + tok + "'", lineno);
      }
    }
    if (indices.empty()) continue;
    try {
      out.terms.push_back(Term::from_indices(indices));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

TermList read_term_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_term_list(ss.str());
}

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno);
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string file_digest(const std::string& path) {
  std::string bytes = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed for " + path + ": " +
                             std::strerror(errno));
}

std::string RunManifest::current_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},
                        {"options", options},
                        {"input_digests", input_digests},
                        {"seed", seed},
                        {"tool_version", tool_version},
                        {"timestamp", timestamp}};
}

nlohmann::json term_to_json(const Term& t) { return t.indices(); }

nlohmann::json support_to_json(const ModelSupport& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const Term& t : s) out.push_back(term_to_json(t));
  return out;
}

nlohmann::json selection_report_to_json(const SelectionReport& report,
                                        const AnnotatedPath& annotated,
                                        const RunManifest& manifest) {
  nlohmann::json j;
  j["method"] = report.method;
  j["lambda_star"] = report.lambda_star;
  j["mu_star"] = report.mu_star;
  j["support"] = support_to_json(report.support);
  j["coefficients"] = std::vector<double>(
      report.coefficients.data(),
      report.coefficients.data() + report.coefficients.size());
  nlohmann::json betti = nlohmann::json::array();
  for (const auto& bp : annotated.breakpoints) {
    betti.push_back(nlohmann::json{{"lambda", bp.lambda},
                                   {"betti", bp.betti},
                                   {"support_size", bp.support.size()},
                                   {"usable", bp.usable}});
  }
  j["betti_per_breakpoint"] = betti;
  nlohmann::json surface;
  surface["lambdas"] = report.surface.lambdas;
  surface["mus"] = report.surface.mus;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(report.surface.values.size()));
  for (Eigen::Index i = 0; i < report.surface.values.rows(); ++i)
    for (Eigen::Index m = 0; m < report.surface.values.cols(); ++m)
      values.push_back(report.surface.values(i, m));
  surface["values_row_major"] = values;
  surface["topology_degenerate"] = report.surface.topology_degenerate;
  j["criterion_surface"] = surface;
  j["manifest"] = manifest.to_json();
  return j;
}

nlohmann::json experiment_report_to_json(const ExperimentReport& report,
                                         const RunManifest& manifest) {
  nlohmann::json j;
  j["preset"] = report.preset;
  j["replications"] = report.config.replications;
  j["n"] = report.config.n;
  j["p"] = report.config.p;
  j["order"] = report.config.k;
  j["splits"] = {report.config.train_fraction,
                 report.config.validation_fraction,
                 report.config.test_fraction};
  std::vector<std::string> names;
  for (Method m : report.methods) names.push_back(method_name(m));
  j["methods"] = names;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    nlohmann::json jc;
    jc["sigma"] = cell.sigma;
    jc["rho"] = cell.rho;
    nlohmann::json stats = nlohmann::json::array();
    for (std::size_t mi = 0; mi < cell.stats.size(); ++mi) {
      const MethodStats& s = cell.stats[mi];
      stats.push_back(nlohmann::json{{"method", names[mi]},
                                     {"model_error_mean", s.me_mean},
                                     {"model_error_sd", s.me_sd},
                                     {"support_size_mean", s.size_mean},
                                     {"support_size_sd", s.size_sd},
                                     {"completed", s.completed},
                                     {"failures", s.failures}});
    }
    jc["methods"] = stats;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  j["manifest"] = manifest.to_json();
  return j;
}

}  // namespace topolasso
