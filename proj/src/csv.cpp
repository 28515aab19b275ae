#include "pooltest/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pooltest {

namespace {

// One CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& cell, double* out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

bool parse_long(const std::string& cell, long* out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (errno != 0 || end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows only
};

Table parse_table(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  long data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      // Tolerate a UTF-8 byte order mark on the first line.
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      table.header = split_record(line);
      for (auto& h : table.header) h = trim(h);
      first = false;
      continue;
    }
    if (trim(line).empty()) continue;
    ++data_row;
    auto cells = split_record(line);
    if (cells.size() != table.header.size()) {
      throw std::invalid_argument(
          "load_csv: row " + std::to_string(data_row) + " has " +
          std::to_string(cells.size()) + " fields, header has " +
          std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (first) {
    throw std::invalid_argument("load_csv: file has no header row");
  }
  return table;
}

std::size_t column_index(const Table& table, const std::string& name) {
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == name) return j;
  }
  throw std::invalid_argument("load_csv: column '" + name +
                              "' not found in CSV header");
}

long required_long(const Table& table, std::size_t row, std::size_t col,
                   const std::string& name) {
  long v = 0;
  if (!parse_long(table.rows[row][col], &v)) {
    throw std::invalid_argument(
        "load_csv: row " + std::to_string(row + 1) + ": cannot parse '" +
        table.rows[row][col] + "' in column '" + name + "' as an integer");
  }
  return v;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

void write_cell(std::string* out, const std::string& s) {
  if (!needs_quotes(s)) {
    *out += s;
    return;
  }
  out->push_back('"');
  for (char c : s) {
    if (c == '"') out->push_back('"');
    out->push_back(c);
  }
  out->push_back('"');
}

}  // namespace

LoadedData load_csv_text(const std::string& text, const ModelSpec& spec) {
  const Table table = parse_table(text);
  const std::size_t y_col = column_index(table, spec.response);
  const std::size_t n_col = column_index(table, spec.pools);
  const std::size_t s_col = column_index(table, spec.pool_size);

  // Expanded covariate columns: the intercept, then per requested column
  // either the numeric values or one indicator per non-reference level.
  const std::size_t n_rows = table.rows.size();
  std::vector<std::string> names{"Intercept"};
  std::vector<std::vector<double>> columns;  // ordered like names[1..]
  std::vector<TermGroup> groups;

  for (const auto& cov : spec.covariates) {
    const std::size_t col = column_index(table, cov);
    bool numeric = n_rows > 0;
    std::vector<double> values(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (!parse_double(table.rows[r][col], &values[r])) {
        numeric = false;
        break;
      }
    }
    TermGroup group;
    group.name = cov;
    group.first_column = names.size();
    if (numeric) {
      group.column_count = 1;
      names.push_back(cov);
      columns.push_back(std::move(values));
    } else {
      std::set<std::string> levels;
      for (std::size_t r = 0; r < n_rows; ++r) {
        levels.insert(trim(table.rows[r][col]));
      }
      if (levels.size() < 2) {
        throw std::invalid_argument("load_csv: categorical column '" + cov +
                                    "' has fewer than two levels");
      }
      group.column_count = levels.size() - 1;
      auto it = levels.begin();
      ++it;  // lexicographically first level is the reference
      for (; it != levels.end(); ++it) {
        names.push_back(cov + *it);
        std::vector<double> indicator(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r) {
          indicator[r] = trim(table.rows[r][col]) == *it ? 1.0 : 0.0;
        }
        columns.push_back(std::move(indicator));
      }
    }
    groups.push_back(std::move(group));
  }

  std::vector<PoolRow> rows;
  rows.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    PoolRow row;
    const long s = required_long(table, r, s_col, spec.pool_size);
    const long n = required_long(table, r, n_col, spec.pools);
    const long y = required_long(table, r, y_col, spec.response);
    if (s < 1) {
      throw std::invalid_argument("load_csv: row " + std::to_string(r + 1) +
                                  ": pool size " + std::to_string(s) +
                                  " is below 1");
    }
    if (n < 1) {
      throw std::invalid_argument("load_csv: row " + std::to_string(r + 1) +
                                  ": pool count " + std::to_string(n) +
                                  " is below 1");
    }
    if (y < 0 || y > n) {
      throw std::invalid_argument("load_csv: row " + std::to_string(r + 1) +
                                  ": positives " + std::to_string(y) +
                                  " outside [0, " + std::to_string(n) + "]");
    }
    row.pool_size = static_cast<int>(s);
    row.pool_count = n;
    row.positives = y;
    if (!spec.covariates.empty()) {
      row.covariates.reserve(columns.size() + 1);
      row.covariates.push_back(1.0);
      for (const auto& column : columns) row.covariates.push_back(column[r]);
    }
    rows.push_back(std::move(row));
  }

  LoadedData out;
  out.data = spec.covariates.empty()
                 ? PooledDataset(std::move(rows))
                 : PooledDataset(std::move(rows), std::move(names));
  out.groups = std::move(groups);
  return out;
}

LoadedData load_csv(const std::string& path, const ModelSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_csv_text(buffer.str(), spec);
}

std::string dataset_to_csv(const PooledDataset& data) {
  std::string out = "positive,pools,poolsize";
  // Skip the intercept column; load_csv puts it back.  Unnamed covariate
  // columns get placeholder headers so the output always reloads.
  std::vector<std::string> names = data.covariate_names();
  for (std::size_t j = names.size(); j < data.covariate_dim(); ++j) {
    names.push_back("x" + std::to_string(j));
  }
  for (std::size_t j = 1; j < names.size(); ++j) {
    out.push_back(',');
    write_cell(&out, names[j]);
  }
  out.push_back('\n');
  char buf[64];
  for (const auto& row : data.rows()) {
    out += std::to_string(row.positives);
    out.push_back(',');
    out += std::to_string(row.pool_count);
    out.push_back(',');
    out += std::to_string(row.pool_size);
    for (std::size_t j = 1; j < row.covariates.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.covariates[j]);
      out.push_back(',');
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace pooltest
