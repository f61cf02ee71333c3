#include "coarse/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coarse {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const Rational& v) const { return to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return std::stod(format_double(*d));
  }
  return format_cell(c);
}

Cell cell_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  auto s = j.get<std::string>();
  if (s == "inf" || s == "-inf" || s == "nan") return std::stod(s);
  if (s.find('/') != std::string::npos) {
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
    }
  }
  return s;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_escape(table.columns[i]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(format_cell(row[i]));
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const Table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    arr.push_back(std::move(obj));
  }
  return {{"columns", table.columns}, {"rows", std::move(arr)}};
}

Table table_from_json(const std::string& name, const nlohmann::json& j) {
  Table t{name, j.at("columns").get<std::vector<std::string>>(), {}};
  for (const auto& obj : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& col : t.columns) row.push_back(cell_from_json(obj.at(col)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  for (auto& t : tables) {
    if (t.name == name) return t;
  }
  tables.push_back({name, std::move(columns), {}});
  return tables.back();
}

nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["parameters"] = report.parameters;
  j["ok"] = report.ok();
  j["failures"] = report.failures;
  auto tables = nlohmann::ordered_json::object();
  for (const auto& t : report.tables) tables[t.name] = to_json(t);
  j["tables"] = std::move(tables);
  return j;
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& prefix) {
  namespace fs = std::filesystem;
  std::vector<std::pair<fs::path, std::string>> files;
  files.emplace_back(fs::path(prefix.string() + ".json"), to_json(report).dump(2) + "\n");
  for (const auto& t : report.tables) {
    std::ostringstream csv;
    write_csv(t, csv);
    files.emplace_back(fs::path(prefix.string() + "." + t.name + ".csv"), csv.str());
  }

  std::vector<fs::path> staged;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& [path, text] : files) {
    fs::path tmp = path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    if (out) staged.push_back(tmp);
    out << text;
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write " + path.string());
    }
  }
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(staged[i], files[i].first, ec);
    if (ec) {
      cleanup();
      throw std::runtime_error("cannot write " + files[i].first.string() + ": " + ec.message());
    }
    written.push_back(files[i].first);
  }
  return written;
}

}  // namespace coarse
