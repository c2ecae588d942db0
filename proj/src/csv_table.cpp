#include "bshadow/csv_table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bshadow {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(nlohmann::json header, std::vector<std::string> columns)
    : header_(std::move(header)), columns_(std::move(columns)) {
  if (!header_.is_object()) throw std::invalid_argument("CSV header must be a JSON object");
}

void CsvTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("CSV row width differs from header");
  for (const auto& c : cells) {
    if (const auto* s = std::get_if<std::string>(&c); s && s->find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument("CSV text cells may not contain commas or newlines");
    }
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  out << '#' << header_.dump() << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else {
              out << v;
            }
          },
          row[i]);
    }
    out << '\n';
  }
  return out.str();
}

std::size_t ParsedCsv::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no CSV column named " + std::string(name));
}

ParsedCsv parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.size() < 2 || lines[0].empty() || lines[0][0] != '#') {
    throw std::invalid_argument("CSV is missing its '#' JSON header line");
  }
  ParsedCsv parsed;
  parsed.header = nlohmann::json::parse(lines[0].substr(1));
  parsed.columns = split_line(lines[1]);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto cells = split_line(lines[i]);
    if (cells.size() != parsed.columns.size()) throw std::invalid_argument("ragged CSV row");
    parsed.rows.push_back(std::move(cells));
  }
  return parsed;
}

}  // namespace bshadow
