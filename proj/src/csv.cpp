#include "predsaddle/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace predsaddle {

void CsvTable::add_row(std::initializer_list<double> values) {
  if (values.size() != columns.size())
    throw CsvError("row has " + std::to_string(values.size()) + " values, expected " +
                   std::to_string(columns.size()));
  rows.emplace_back(values);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv_string(const CsvTable& table) {
  std::string out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open for writing: " + path.string());
  f << to_csv_string(table);
  if (!f) throw CsvError("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty csv: missing header row");
  CsvTable table;
  table.columns = split_fields(line);
  for (const auto& c : table.columns)
    if (c.empty()) throw CsvError("header row has an empty column name");

  std::int64_t row_index = 0;
  while (std::getline(in, line)) {
    ++row_index;
    if (line.empty()) throw CsvError("row " + std::to_string(row_index) + ": empty line");
    const auto fields = split_fields(line);
    if (fields.size() != table.columns.size())
      throw CsvError("row " + std::to_string(row_index) + ": expected " +
                     std::to_string(table.columns.size()) + " fields, found " +
                     std::to_string(fields.size()));
    std::vector<double> row;
    for (const auto& field : fields) {
      double value = 0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw CsvError("row " + std::to_string(row_index) + ": not a number: '" + field + "'");
      row.push_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const CsvError& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

}  // namespace predsaddle
