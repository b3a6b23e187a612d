#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

// Tabular result emission: CSV with a fixed column order, reals at 17
// significant digits, newline-terminated, plus an adjacent JSON summary
// carrying the same values.

namespace mpslab {

struct Table {
  using Cell = std::variant<long long, double, std::string>;

  std::string name;
  std::vector<std::pair<std::string, std::string>> metadata;  // emitted as a leading # line
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> cells);
};

// %.17g
std::string format_real(double v);
std::string format_cell(const Table::Cell& c);

// Writes `path` (CSV) and the sibling `<stem>.json`.
void write_table(const Table& t, const std::filesystem::path& csv_path);

// Reads a CSV produced by write_table; all cells come back as strings.
Table read_csv(const std::filesystem::path& csv_path);

// Formatted string rows (the exact CSV cell texts); round-trip comparisons go
// through this representation.
std::vector<std::vector<std::string>> formatted_rows(const Table& t);

}  // namespace mpslab
