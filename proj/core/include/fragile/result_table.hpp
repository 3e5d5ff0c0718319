#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fragile {

// A CSV cell. Numbers are rendered with %.10g so output is byte-stable.
class Cell {
 public:
  Cell(double v);  // NOLINT(google-explicit-constructor)
  Cell(int v);     // NOLINT(google-explicit-constructor)
  Cell(std::size_t v);  // NOLINT(google-explicit-constructor)
  Cell(std::uint64_t v, int);  // raw 64-bit value, e.g. a seed
  Cell(std::string text);  // NOLINT(google-explicit-constructor)
  Cell(const char* text);  // NOLINT(google-explicit-constructor)

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

std::string format_number(double v);

class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  // Header lines written as "# key: value" before the column names.
  void set_provenance(const std::string& key, const std::string& value);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::string& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

}  // namespace fragile
