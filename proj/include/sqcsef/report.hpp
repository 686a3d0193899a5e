#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqcsef/grading.hpp"

namespace sqcsef::report {

inline constexpr const char* kToolVersion = "sqcsef 1.0.0";

/// A number (NaN for "not available") or free text.
using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;   ///< file stem in the CSV bundle
  std::string title;  ///< markdown heading
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int decimals = 4;  ///< markdown precision for numeric cells
  std::vector<int> column_decimals;  ///< per-column override, -1 keeps `decimals`

  [[nodiscard]] int precision(std::size_t column) const {
    return column < column_decimals.size() && column_decimals[column] >= 0 ? column_decimals[column] : decimals;
  }

  bool operator==(const Table&) const = default;
};

/// A complete run record. Everything the markdown shows is derivable from
/// these fields, so a saved JSON record re-renders to identical bytes.
struct RunReport {
  std::string tool_version = kToolVersion;
  std::string provenance;
  std::string config_echo;  ///< JSON text of the effective configuration
  std::vector<std::string> warnings;
  std::vector<Table> tables;
  std::optional<grading::GradingStandard> standard;

  [[nodiscard]] const Table* find(const std::string& name) const;
};

enum class Format { markdown, json, csv_bundle };
Format parse_format(const std::string& s);

std::string to_json(const RunReport& r);
RunReport from_json(const std::string& text);

/// Markdown with one section per table, the grading standard in the
/// "Meet at least ... of the following conditions" layout, and a link to the
/// scree chart when a variance table is present.
std::string to_markdown(const RunReport& r);

/// Writes `format` into `dir` (created if needed) and returns the paths
/// written. markdown: report.md plus scree.svg; json: report.json;
/// csv-bundle: one CSV per table plus manifest.json. Throws DataError when
/// the directory cannot be written.
std::vector<std::filesystem::path> render(const RunReport& r, Format format, const std::filesystem::path& dir);

/// Rebuilds a report from a CSV bundle directory.
RunReport read_csv_bundle(const std::filesystem::path& dir);

/// Shortest text that parses back to the same double ("nan" for NaN).
std::string format_number(double v);

std::string table_markdown(const Table& t);
std::string table_csv(const Table& t);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace sqcsef::report
