#pragma once

// Reader for the small TOML subset used by indicator and pipeline config
// files: `[table]` / `[table."quoted key"]` headers, `key = value` pairs,
// strings, booleans, integers, floats, and (nested) arrays. Tables keep
// their file order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sqcsef {

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, std::int64_t, double, std::string, Array> data;

  [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(data); }
  [[nodiscard]] bool is_array() const { return std::holds_alternative<Array>(data); }
};

class ConfigTable {
 public:
  std::vector<std::string> path;  ///< e.g. {"indicator", "Seedling Height"}
  std::vector<std::pair<std::string, ConfigValue>> entries;
  int line = 0;

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] const ConfigValue* find(const std::string& key) const;

  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::vector<std::int64_t> get_int_list(const std::string& key) const;
  [[nodiscard]] std::vector<double> get_double_list(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> get_string_list(const std::string& key) const;

  [[nodiscard]] std::string display_name() const;
};

class ConfigDocument {
 public:
  std::string source;
  ConfigTable root;  ///< keys that appear before any table header
  std::vector<ConfigTable> tables;

  /// First table whose path equals `path`, or nullptr.
  [[nodiscard]] const ConfigTable* table(const std::vector<std::string>& path) const;
  /// All tables whose path starts with `prefix` and is one element longer.
  [[nodiscard]] std::vector<const ConfigTable*> children(const std::string& prefix) const;
};

/// Throws ConfigError naming the source and line on malformed input.
ConfigDocument parse_config(const std::string& text, const std::string& source = "<string>");
ConfigDocument load_config_file(const std::filesystem::path& path);

}  // namespace sqcsef
