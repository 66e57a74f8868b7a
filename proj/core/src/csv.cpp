#include "mcate/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mcate {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) {
    throw std::invalid_argument(context + ": not a number: '" + text + "'");
  }
  return value;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::vector<std::vector<std::string>> parse_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(record);
    record.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw std::invalid_argument("read_csv: unterminated quoted field");
  if (!record.empty() || !field.empty() || field_started) end_record();
  return records;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  auto records = parse_records(in);
  if (records.empty()) throw std::invalid_argument("read_csv: empty input");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() == 1 && records[i][0].empty()) continue;  // trailing blank line
    if (records[i].size() != table.header.size()) {
      throw std::invalid_argument("read_csv: row " + std::to_string(i) + " has " +
                                  std::to_string(records[i].size()) + " fields, expected " +
                                  std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(row[i]);
    }
    out << "\r\n";
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(out, table);
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

void save_sample_csv(const std::string& path, const ObservationalSample& sample) {
  sample.validate();
  CsvTable table;
  const int d = sample.dim();
  for (int j = 0; j < d; ++j) table.header.push_back("x" + std::to_string(j));
  table.header.emplace_back("treatment_idx");
  table.header.emplace_back("treatment");
  table.header.emplace_back("outcome");
  table.rows.reserve(static_cast<std::size_t>(sample.n()));
  for (int i = 0; i < sample.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(d) + 3);
    for (int j = 0; j < d; ++j) row.push_back(format_double(sample.covariates(i, j)));
    const int k = sample.treatment_idx[static_cast<std::size_t>(i)];
    row.push_back(std::to_string(k));
    row.push_back(format_double(sample.levels.value(k)));
    row.push_back(format_double(sample.outcome(i)));
    table.rows.push_back(std::move(row));
  }
  write_csv_file(path, table);
}

ObservationalSample load_sample_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t cols = table.header.size();
  if (cols < 4) throw std::invalid_argument("load_sample_csv: too few columns in " + path);
  const std::size_t d = cols - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (table.header[j] != "x" + std::to_string(j)) {
      throw std::invalid_argument("load_sample_csv: unexpected column '" + table.header[j] + "'");
    }
  }
  if (table.header[d] != "treatment_idx" || table.header[d + 1] != "treatment" ||
      table.header[d + 2] != "outcome") {
    throw std::invalid_argument("load_sample_csv: unexpected trailing columns");
  }
  const std::size_t n = table.rows.size();
  if (n == 0) throw std::invalid_argument("load_sample_csv: no data rows");

  ObservationalSample sample;
  sample.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  sample.outcome.resize(static_cast<Eigen::Index>(n));
  sample.treatment_idx.resize(n);
  std::map<int, double> level_values;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::string where = "row " + std::to_string(i + 2);
    for (std::size_t j = 0; j < d; ++j) {
      sample.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(row[j], where + " x" + std::to_string(j));
    }
    const double idx_raw = parse_double(row[d], where + " treatment_idx");
    const int k = static_cast<int>(idx_raw);
    if (k < 0 || static_cast<double>(k) != idx_raw) {
      throw std::invalid_argument("load_sample_csv: bad treatment index at " + where);
    }
    const double level = parse_double(row[d + 1], where + " treatment");
    const auto it = level_values.find(k);
    if (it == level_values.end()) {
      level_values[k] = level;
    } else if (it->second != level) {
      throw std::invalid_argument("load_sample_csv: conflicting value for level " +
                                  std::to_string(k) + " at " + where);
    }
    sample.treatment_idx[i] = k;
    sample.outcome(static_cast<Eigen::Index>(i)) = parse_double(row[d + 2], where + " outcome");
  }
  const int max_idx = level_values.rbegin()->first;
  std::vector<double> levels(static_cast<std::size_t>(max_idx) + 1);
  for (int k = 0; k <= max_idx; ++k) {
    const auto it = level_values.find(k);
    if (it == level_values.end()) {
      throw std::invalid_argument("load_sample_csv: level index " + std::to_string(k) +
                                  " never observed, grid has a gap");
    }
    levels[static_cast<std::size_t>(k)] = it->second;
  }
  sample.levels = TreatmentLevels(std::move(levels));
  sample.validate();
  return sample;
}

}  // namespace mcate
