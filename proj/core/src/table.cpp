#include "mpslab/table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mpslab/errors.hpp"

namespace mpslab {

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != header.size()) {
    throw ValidationError("Table '" + name + "': row width " + std::to_string(cells.size()) +
                          " does not match header width " + std::to_string(header.size()));
  }
  rows.push_back(std::move(cells));
}

std::string format_real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Table::Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<double>(c)) return format_real(std::get<double>(c));
  const std::string& s = std::get<std::string>(c);
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
    throw ValidationError("Table cell contains a separator: '" + s + "'");
  }
  return s;
}

std::vector<std::vector<std::string>> formatted_rows(const Table& t) {
  std::vector<std::vector<std::string>> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& c : row) cells.push_back(format_cell(c));
    out.push_back(std::move(cells));
  }
  return out;
}

void write_table(const Table& t, const std::filesystem::path& csv_path) {
  std::ofstream os(csv_path);
  if (!os) throw ValidationError("write_table: cannot open " + csv_path.string());
  if (!t.metadata.empty()) {
    os << "#";
    for (const auto& [k, v] : t.metadata) os << " " << k << "=" << v;
    os << "\n";
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    os << t.header[i] << (i + 1 < t.header.size() ? "," : "");
  }
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << format_cell(row[i]) << (i + 1 < row.size() ? "," : "");
    }
    os << "\n";
  }
  os.flush();
  if (!os) throw ValidationError("write_table: write failed for " + csv_path.string());

  nlohmann::ordered_json j;
  j["name"] = t.name;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["header"] = t.header;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<long long>(c)) jr.push_back(std::get<long long>(c));
      else if (std::holds_alternative<double>(c)) jr.push_back(std::get<double>(c));
      else jr.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);

  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream js(json_path);
  if (!js) throw ValidationError("write_table: cannot open " + json_path.string());
  js << j.dump(1) << "\n";
  if (!js) throw ValidationError("write_table: write failed for " + json_path.string());
}

Table read_csv(const std::filesystem::path& csv_path) {
  std::ifstream is(csv_path);
  if (!is) throw ValidationError("read_csv: cannot open " + csv_path.string());
  Table t;
  t.name = csv_path.stem().string();
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!have_header && !line.empty() && line.front() == '#') {
      std::istringstream ms(line.substr(1));
      std::string tok;
      while (ms >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) t.metadata.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      }
      continue;
    }
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      std::vector<Table::Cell> row;
      row.reserve(cells.size());
      for (auto& c : cells) row.emplace_back(std::move(c));
      t.add_row(std::move(row));
    }
  }
  return t;
}

}  // namespace mpslab
