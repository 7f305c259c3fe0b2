#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "predsaddle/types.hpp"

namespace predsaddle {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric table with a header row. Written as UTF-8, comma separators, LF
// line endings; numbers in shortest round-trip decimal form so identical
// values always produce identical bytes.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> values);
};

// Shortest decimal representation that parses back to exactly x.
std::string format_double(double x);

std::string to_csv_string(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Strict parse: every row must have one value per column; errors name the
// offending 1-indexed data row.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

}  // namespace predsaddle
