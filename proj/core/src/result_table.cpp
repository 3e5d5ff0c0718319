#include "fragile/result_table.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fragile/error.hpp"

namespace fragile {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Cell::Cell(double v) : text_(format_number(v)) {}
Cell::Cell(int v) : text_(std::to_string(v)) {}
Cell::Cell(std::size_t v) : text_(std::to_string(v)) {}
Cell::Cell(std::uint64_t v, int) : text_(std::to_string(v)) {}
Cell::Cell(std::string text) : text_(std::move(text)) {
  if (text_.find_first_of(",\n\"") != std::string::npos) {
    throw ParameterError("CSV cell contains a separator: " + text_);
  }
}
Cell::Cell(const char* text) : Cell(std::string(text)) {}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ParameterError("result table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw ParameterError("row has " + std::to_string(row.size()) + " cells, table has " +
                         std::to_string(columns_.size()) + " columns");
  }
  std::vector<std::string> out;
  out.reserve(row.size());
  for (auto& c : row) out.push_back(c.text());
  rows_.push_back(std::move(out));
}

void ResultTable::set_provenance(const std::string& key, const std::string& value) {
  for (auto& kv : provenance_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  provenance_.emplace_back(key, value);
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw ParameterError("no column named " + name);
}

double ResultTable::number(std::size_t row, const std::string& column) const {
  const std::string& s = rows_.at(row)[column_index(column)];
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ParameterError("cell '" + s + "' in column " + column + " is not numeric");
  }
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (const auto& [k, v] : provenance_) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << to_csv();
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace fragile
