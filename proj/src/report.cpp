#include "sqcsef/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sqcsef/error.hpp"
#include "sqcsef/factors.hpp"

namespace sqcsef::report {

using json = nlohmann::ordered_json;

const Table* RunReport::find(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Format parse_format(const std::string& s) {
  if (s == "markdown") return Format::markdown;
  if (s == "json") return Format::json;
  if (s == "csv-bundle") return Format::csv_bundle;
  throw ConfigError("report format must be markdown, json or csv-bundle, got '" + s + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

namespace {

double parse_number(const std::string& s, const std::string& where) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw DataError(where + ": not a number: '" + s + "'");
  return v;
}

json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isfinite(v)) return v;
  return json{{"nonfinite", format_number(v)}};
}

Cell cell_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("nonfinite")) return parse_number(j.at("nonfinite").get<std::string>(), "report");
  throw DataError("report: malformed table cell");
}

json table_meta(const Table& t) {
  return json{{"name", t.name},
              {"title", t.title},
              {"columns", t.columns},
              {"decimals", t.decimals},
              {"column_decimals", t.column_decimals}};
}

json report_meta(const RunReport& r) {
  json j;
  j["format"] = "sqcsef-run-report";
  j["version"] = 1;
  j["tool_version"] = r.tool_version;
  j["provenance"] = r.provenance;
  j["config"] = r.config_echo.empty() ? json(nullptr) : json::parse(r.config_echo);
  j["warnings"] = r.warnings;
  j["standard"] = r.standard ? json::parse(grading::standard_json(*r.standard)) : json(nullptr);
  return j;
}

RunReport report_from_meta(const json& j) {
  if (j.at("format").get<std::string>() != "sqcsef-run-report") throw DataError("report: unexpected format tag");
  if (j.at("version").get<int>() != 1) throw DataError("report: unsupported version");
  RunReport r;
  r.tool_version = j.at("tool_version").get<std::string>();
  r.provenance = j.at("provenance").get<std::string>();
  if (!j.at("config").is_null()) r.config_echo = j.at("config").dump();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (!j.at("standard").is_null()) r.standard = grading::standard_from_json(j.at("standard").dump());
  return r;
}

Table table_from_meta(const json& j) {
  Table t;
  t.name = j.at("name").get<std::string>();
  t.title = j.at("title").get<std::string>();
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.decimals = j.at("decimals").get<int>();
  t.column_decimals = j.at("column_decimals").get<std::vector<int>>();
  return t;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV line; quoted cells are text, bare cells are numbers.
std::vector<std::pair<std::string, bool>> split_typed(const std::string& line) {
  std::vector<std::pair<std::string, bool>> cells;
  std::string cell;
  bool quoted = false;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(std::move(cell), quoted);
      cell.clear();
      quoted = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.emplace_back(std::move(cell), quoted);
  return cells;
}

std::string markdown_cell(const Cell& c, int decimals) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.{}f}", v, decimals);
}

std::string scree_svg_for(const RunReport& r) {
  const Table* t = r.find("variance");
  if (t == nullptr || t->rows.empty()) return {};
  Eigen::VectorXd ev(static_cast<Eigen::Index>(t->rows.size()));
  for (std::size_t i = 0; i < t->rows.size(); ++i) ev[static_cast<Eigen::Index>(i)] = std::get<double>(t->rows[i][1]);
  return factors::scree_svg(ev);
}

}  // namespace

std::string to_json(const RunReport& r) {
  json j = report_meta(r);
  j["tables"] = json::array();
  for (const auto& t : r.tables) {
    json tj = table_meta(t);
    tj["rows"] = json::array();
    for (const auto& row : t.rows) {
      json rj = json::array();
      for (const auto& c : row) rj.push_back(cell_json(c));
      tj["rows"].push_back(std::move(rj));
    }
    j["tables"].push_back(std::move(tj));
  }
  return j.dump(2) + "\n";
}

RunReport from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunReport r = report_from_meta(j);
    for (const auto& tj : j.at("tables")) {
      Table t = table_from_meta(tj);
      for (const auto& rj : tj.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : rj) row.push_back(cell_from_json(c));
        t.rows.push_back(std::move(row));
      }
      r.tables.push_back(std::move(t));
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

std::string table_markdown(const Table& t) {
  std::string out = "|";
  std::string rule = "|";
  for (const auto& c : t.columns) {
    out += " " + c + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& row : t.rows) {
    out += "|";
    for (std::size_t i = 0; i < row.size(); ++i) out += " " + markdown_cell(row[i], t.precision(i)) + " |";
    out += "\n";
  }
  return out;
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + quote(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      if (const auto* s = std::get_if<std::string>(&row[i])) {
        out += quote(*s);
      } else {
        out += format_number(std::get<double>(row[i]));
      }
    }
    out += "\n";
  }
  return out;
}

std::string to_markdown(const RunReport& r) {
  std::string out = "# Seedling quality classification report\n\n";
  out += fmt::format("Tool: {}\n\nProvenance: {}\n\n", r.tool_version, r.provenance);
  for (const auto& t : r.tables) {
    out += "## " + t.title + "\n\n" + table_markdown(t) + "\n";
    if (t.name == "variance") out += "![Scree plot](scree.svg)\n\n";
  }
  if (r.standard) {
    out += "## Grading standard\n\n" + grading::standard_markdown(*r.standard) + "\n";
  }
  if (!r.warnings.empty()) {
    out += "## Warnings\n\n";
    for (const auto& w : r.warnings) out += "- " + w + "\n";
    out += "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> render(const RunReport& r, Format format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    written.push_back(dir / name);
    write_text(written.back(), text);
  };
  switch (format) {
    case Format::markdown: {
      emit("report.md", to_markdown(r));
      const std::string svg = scree_svg_for(r);
      if (!svg.empty()) emit("scree.svg", svg);
      break;
    }
    case Format::json:
      emit("report.json", to_json(r));
      break;
    case Format::csv_bundle: {
      json manifest = report_meta(r);
      manifest["tables"] = json::array();
      for (const auto& t : r.tables) {
        json tj = table_meta(t);
        tj["file"] = t.name + ".csv";
        manifest["tables"].push_back(std::move(tj));
        emit(t.name + ".csv", table_csv(t));
      }
      emit("manifest.json", manifest.dump(2) + "\n");
      break;
    }
  }
  return written;
}

RunReport read_csv_bundle(const std::filesystem::path& dir) {
  try {
    const json manifest = json::parse(read_text(dir / "manifest.json"));
    RunReport r = report_from_meta(manifest);
    for (const auto& tj : manifest.at("tables")) {
      Table t = table_from_meta(tj);
      const std::string file = tj.at("file").get<std::string>();
      std::istringstream in(read_text(dir / file));
      std::string line;
      bool header = true;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_typed(line);
        if (cells.size() != t.columns.size()) {
          throw DataError(fmt::format("{} line {}: {} cells, expected {}", file, line_no, cells.size(), t.columns.size()));
        }
        if (header) {
          header = false;
          continue;
        }
        std::vector<Cell> row;
        for (const auto& [text, quoted] : cells) {
          if (quoted) {
            row.emplace_back(text);
          } else {
            row.emplace_back(parse_number(text, fmt::format("{} line {}", file, line_no)));
          }
        }
        t.rows.push_back(std::move(row));
      }
      r.tables.push_back(std::move(t));
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("csv bundle manifest: ") + e.what());
  }
}

}  // namespace sqcsef::report
