#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bshadow {

/// 17 significant digits; round-trips every double.
std::string format_double(double x);

/**
 * CSV with a self-describing first line: '#' followed by a compact JSON
 * object (the resolved run configuration), then a column header line and
 * the data rows.
 */
class CsvTable {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  CsvTable(nlohmann::json header, std::vector<std::string> columns);

  void add_row(std::vector<Cell> cells);

  const nlohmann::json& header() const { return header_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;

 private:
  nlohmann::json header_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct ParsedCsv {
  nlohmann::json header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

ParsedCsv parse_csv(std::string_view text);

}  // namespace bshadow
