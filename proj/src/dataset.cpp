#include "sqcsef/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sqcsef/config_file.hpp"
#include "sqcsef/error.hpp"

namespace sqcsef {

std::string to_string(Direction d) { return d == Direction::maximize ? "maximize" : "minimize"; }

Direction parse_direction(const std::string& s) {
  if (s == "maximize") return Direction::maximize;
  if (s == "minimize") return Direction::minimize;
  throw ConfigError("direction must be \"maximize\" or \"minimize\", got \"" + s + "\"");
}

RawDataset::RawDataset(std::vector<IndicatorSpec> indicators, Eigen::MatrixXd rows, std::string source)
    : indicators_(std::move(indicators)), rows_(std::move(rows)), source_(std::move(source)) {
  if (indicators_.empty()) throw DataError("dataset needs at least one indicator");
  if (static_cast<Eigen::Index>(indicators_.size()) != rows_.cols()) {
    throw DataError(fmt::format("dataset has {} columns but {} indicator specs", rows_.cols(), indicators_.size()));
  }
  if (rows_.rows() < 2) throw DataError(fmt::format("dataset needs at least 2 samples, got {}", rows_.rows()));
  std::set<std::string> seen;
  for (const auto& spec : indicators_) {
    if (!seen.insert(spec.name).second) throw DataError("duplicate indicator name '" + spec.name + "'");
  }
  for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      const double v = rows_(i, j);
      if (!std::isfinite(v)) {
        throw DataError(fmt::format("row {}, column '{}': non-finite value", i + 1, indicators_[j].name));
      }
      if (indicators_[j].integer_valued && v != std::floor(v)) {
        throw DataError(
            fmt::format("row {}, column '{}': integer indicator holds {}", i + 1, indicators_[j].name, v));
      }
    }
  }
}

ScaleParams scale_params_from_range(const IndicatorSpec& spec, double min, double max) {
  if (!(max > min)) throw DataError("indicator '" + spec.name + "' has a constant column; cannot normalize");
  if (spec.direction == Direction::maximize) return {min, max, 0.0};
  return {0.0, max - min, max};
}

// -- ingestion ---------------------------------------------------------------

std::vector<IndicatorSpec> parse_indicator_config(const std::string& text, const std::string& source) {
  const ConfigDocument doc = parse_config(text, source);
  std::vector<IndicatorSpec> specs;
  for (const auto& t : doc.tables) {
    if (t.path.empty() || t.path[0] != "indicator") continue;
    if (t.path.size() != 2) throw ConfigError(source + ": expected [indicator.\"<name>\"] headers");
    IndicatorSpec spec;
    spec.name = t.path[1];
    spec.unit = t.get_string("unit", "");
    spec.direction = parse_direction(t.get_string("direction", "maximize"));
    spec.integer_valued = t.get_bool("integer", false);
    spec.decimals = static_cast<int>(t.get_int("decimals", -1));
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError(source + ": no [indicator.\"<name>\"] tables");
  return specs;
}

std::vector<IndicatorSpec> load_indicator_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open indicator config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_indicator_config(ss.str(), path.string());
}

std::string format_indicator_config(std::span<const IndicatorSpec> specs) {
  std::string out;
  for (const auto& s : specs) {
    out += fmt::format("[indicator.\"{}\"]\nunit = \"{}\"\ndirection = \"{}\"\ninteger = {}\n", s.name, s.unit,
                       to_string(s.direction), s.integer_valued ? "true" : "false");
    if (s.decimals >= 0) out += fmt::format("decimals = {}\n", s.decimals);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RawDataset parse_csv(const std::string& text, const std::vector<IndicatorSpec>& specs, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  // Skip a UTF-8 byte order mark and leading blank lines.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": empty file");
  for (auto& h : header) h = trim(h);

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      throw DataError(fmt::format("{}: duplicate header '{}'", source, header[c]));
    }
  }
  std::vector<std::string> missing;
  std::vector<std::size_t> source_col(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    auto it = column_of.find(specs[j].name);
    if (it == column_of.end()) {
      missing.push_back(specs[j].name);
    } else {
      source_col[j] = it->second;
    }
  }
  std::vector<std::string> unexpected;
  for (const auto& h : header) {
    if (std::none_of(specs.begin(), specs.end(), [&](const IndicatorSpec& s) { return s.name == h; })) {
      unexpected.push_back(h);
    }
  }
  if (!missing.empty() || !unexpected.empty()) {
    throw DataError(fmt::format("{}: header does not match indicator config; missing columns [{}], unmatched headers [{}]",
                                source, fmt::join(missing, ", "), fmt::join(unexpected, ", ")));
  }

  std::vector<std::vector<double>> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(fmt::format("{}: row {} (line {}) has {} cells, expected {}", source, row, line_no,
                                  cells.size(), header.size()));
    }
    std::vector<double> parsed(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const std::string cell = trim(cells[source_col[j]]);
      if (cell.empty()) {
        throw DataError(fmt::format("{}: row {} (line {}), column '{}': missing value", source, row, line_no,
                                    specs[j].name));
      }
      double v = 0.0;
      const char* first = cell.data() + (cell.starts_with('+') ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(fmt::format("{}: row {} (line {}), column '{}': non-numeric value '{}'", source, row,
                                    line_no, specs[j].name, cell));
      }
      parsed[j] = v;
    }
    values.push_back(std::move(parsed));
  }

  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(specs.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < specs.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  try {
    return RawDataset(specs, std::move(m), source);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

RawDataset load_csv(const std::filesystem::path& path, const std::vector<IndicatorSpec>& specs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), specs, path.string());
}

std::string format_csv(const RawDataset& d) {
  std::string out;
  for (std::size_t j = 0; j < d.indicators().size(); ++j) {
    if (j > 0) out += ',';
    out += quote_csv(d.indicators()[j].name);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < d.samples(); ++i) {
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      if (j > 0) out += ',';
      out += fmt::format("{}", d.rows()(i, j));
    }
    out += '\n';
  }
  return out;
}

// -- transforms --------------------------------------------------------------

IndicatorSummary summarize(std::span<const double> column) {
  const std::size_t m = column.size();
  if (m < 2) throw DataError(fmt::format("descriptive statistics need at least 2 samples, got {}", m));
  IndicatorSummary s;
  s.min = *std::min_element(column.begin(), column.end());
  s.max = *std::max_element(column.begin(), column.end());
  double sum = 0.0;
  for (double v : column) sum += v;
  s.mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : column) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(m - 1));
  // Rounding can push the mean of a constant column a hair outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

DescriptiveStats describe(const RawDataset& d) {
  DescriptiveStats out;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    out.names.push_back(d.indicators()[j].name);
    out.columns.push_back(summarize(d.column(j)));
  }
  return out;
}

RawDataset forwardize(const RawDataset& d) {
  Eigen::MatrixXd rows = d.rows();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d.indicators()[j].direction == Direction::minimize) {
      const double top = rows.col(j).maxCoeff();
      rows.col(j) = (top - rows.col(j).array()).matrix();
    }
  }
  return RawDataset(d.indicators(), std::move(rows), d.source());
}

StandardizedDataset normalize(const RawDataset& d) {
  StandardizedDataset out;
  out.indicators = d.indicators();
  out.matrix.resize(d.samples(), d.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const auto& spec = d.indicators()[j];
    const auto col = d.rows().col(j);
    const ScaleParams p = scale_params_from_range(spec, col.minCoeff(), col.maxCoeff());
    for (Eigen::Index i = 0; i < d.samples(); ++i) {
      const double f = spec.direction == Direction::minimize ? p.forward_max - col(i) : col(i);
      out.matrix(i, j) = std::clamp((f - p.lo) / (p.hi - p.lo), 0.0, 1.0);
    }
    out.scale.push_back(p);
  }
  return out;
}

double denormalize_value(double v, const IndicatorSpec& spec, const ScaleParams& params) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw NumericError(fmt::format("denormalize: value {} for '{}' is outside [0, 1]", v, spec.name));
  }
  const double forwarded = params.lo + v * (params.hi - params.lo);
  return spec.direction == Direction::minimize ? params.forward_max - forwarded : forwarded;
}

double normalize_value(double x, const IndicatorSpec& spec, const ScaleParams& params) {
  const double forwarded = spec.direction == Direction::minimize ? params.forward_max - x : x;
  return (forwarded - params.lo) / (params.hi - params.lo);
}

}  // namespace sqcsef
