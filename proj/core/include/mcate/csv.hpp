#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcate/treatment.hpp"

namespace mcate {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);

// RFC 4180 field quoting: fields containing commas, quotes or newlines are
// quoted, embedded quotes doubled.
std::string csv_escape(const std::string& field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Parser accepts both CRLF and LF records and quoted fields spanning lines.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

// Sample serialization. Columns: x0..x{d-1}, treatment_idx, treatment,
// outcome. Levels are rebuilt from the (index, value) pairs present; every
// index from 0 to the maximum must appear somewhere in the file.
void save_sample_csv(const std::string& path, const ObservationalSample& sample);
ObservationalSample load_sample_csv(const std::string& path);

}  // namespace mcate
