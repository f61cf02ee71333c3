#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarse/rational.hpp"

namespace coarse {

/// Empty cells are written as "" in CSV and null in JSON.
using Cell = std::variant<std::monostate, std::int64_t, double, Rational, std::string, bool>;

/// 12 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);
std::string format_cell(const Cell& c);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

void write_csv(const Table& table, std::ostream& out);

/// Array of objects in column order. Doubles are rounded to 12 significant
/// digits, rationals become "num/den" strings.
nlohmann::ordered_json to_json(const Table& table);
Table table_from_json(const std::string& name, const nlohmann::json& j);

struct Report {
  std::string experiment;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::deque<Table> tables;  // deque: references returned by table() stay valid
  std::vector<std::string> failures;  // each names its witness

  Table& table(const std::string& name, std::vector<std::string> columns);
  void fail(std::string message) { failures.push_back(std::move(message)); }
  bool ok() const { return failures.empty(); }
};

nlohmann::ordered_json to_json(const Report& report);

/// Writes <prefix>.json and <prefix>.<table>.csv for every table. Files are
/// staged under temporary names and renamed at the end; throws
/// std::runtime_error naming the path on I/O failure.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& prefix);

}  // namespace coarse
