#include "sqcsef/config_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sqcsef/error.hpp"

namespace sqcsef {
namespace {

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  ConfigDocument run() {
    ConfigDocument doc;
    doc.source = source_;
    ConfigTable* current = &doc.root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        ++pos_;
        ConfigTable table;
        table.line = line_;
        table.path = parse_header();
        for (const auto& t : doc.tables) {
          if (t.path == table.path) fail("duplicate table [" + table.display_name() + "]");
        }
        doc.tables.push_back(std::move(table));
        current = &doc.tables.back();
        end_of_line();
        continue;
      }
      std::string key = parse_key();
      skip_blank();
      expect('=');
      skip_blank();
      ConfigValue value = parse_value();
      if (current->has(key)) fail("duplicate key '" + key + "'");
      current->entries.emplace_back(std::move(key), std::move(value));
      end_of_line();
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  // Whitespace, newlines and comments inside arrays.
  void skip_space_multiline() {
    for (;;) {
      skip_blank();
      if (pos_ >= text_.size()) return;
      if (text_[pos_] == '\n') {
        ++line_;
        ++pos_;
      } else if (text_[pos_] == '#') {
        skip_comment();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_blank();
    if (pos_ < text_.size() && text_[pos_] == '#') skip_comment();
    if (pos_ < text_.size() && text_[pos_] != '\n') fail("unexpected trailing characters");
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::vector<std::string> parse_header() {
    std::vector<std::string> path;
    for (;;) {
      skip_blank();
      path.push_back(parse_key());
      skip_blank();
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        continue;
      }
      expect(']');
      return path;
    }
  }

  std::string parse_key() {
    if (pos_ < text_.size() && text_[pos_] == '"') return parse_string();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected a key");
    return text_.substr(start, pos_ - start);
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    expect('"');
    return out;
  }

  ConfigValue parse_value() {
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return ConfigValue{parse_string()};
    if (c == '[') {
      const int opened = line_;
      ++pos_;
      ConfigValue::Array items;
      for (;;) {
        skip_space_multiline();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          break;
        }
        items.push_back(parse_value());
        skip_space_multiline();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ >= text_.size()) {
          line_ = opened;
          fail("array opened here is never closed");
        }
        expect(']');
        break;
      }
      return ConfigValue{std::move(items)};
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
           text_[pos_] != ']' && text_[pos_] != '#') {
      ++pos_;
    }
    const std::string token = text_.substr(start, pos_ - start);
    if (token == "true") return ConfigValue{true};
    if (token == "false") return ConfigValue{false};
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits.push_back(ch);
    }
    const bool looks_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                             digits == "+inf" || digits == "-inf" || digits == "nan";
    if (!looks_float) {
      std::int64_t v = 0;
      const char* first = digits.data() + (digits.starts_with('+') ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return ConfigValue{v};
    } else {
      double v = 0.0;
      const char* first = digits.data() + (digits.starts_with('+') ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) return ConfigValue{v};
    }
    fail("cannot parse value '" + token + "'");
  }

  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void type_error(const ConfigTable& t, const std::string& key, const char* expected) {
  throw ConfigError("config [" + t.display_name() + "] key '" + key + "': expected " + expected);
}

double as_double(const ConfigTable& t, const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
  type_error(t, key, "a number");
}

}  // namespace

bool ConfigTable::has(const std::string& key) const { return find(key) != nullptr; }

const ConfigValue* ConfigTable::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string ConfigTable::get_string(const std::string& key) const {
  const auto* v = find(key);
  if (v == nullptr) throw ConfigError("config [" + display_name() + "]: missing key '" + key + "'");
  if (!v->is_string()) type_error(*this, key, "a string");
  return std::get<std::string>(v->data);
}

std::string ConfigTable::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

bool ConfigTable::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (v == nullptr) return fallback;
  if (const auto* b = std::get_if<bool>(&v->data)) return *b;
  type_error(*this, key, "a boolean");
}

std::int64_t ConfigTable::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = find(key);
  if (v == nullptr) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&v->data)) return *i;
  type_error(*this, key, "an integer");
}

double ConfigTable::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  if (v == nullptr) return fallback;
  return as_double(*this, key, *v);
}

std::vector<std::int64_t> ConfigTable::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  const auto* v = find(key);
  if (v == nullptr) return out;
  if (!v->is_array()) type_error(*this, key, "an array of integers");
  for (const auto& item : std::get<ConfigValue::Array>(v->data)) {
    const auto* i = std::get_if<std::int64_t>(&item.data);
    if (i == nullptr) type_error(*this, key, "an array of integers");
    out.push_back(*i);
  }
  return out;
}

std::vector<double> ConfigTable::get_double_list(const std::string& key) const {
  std::vector<double> out;
  const auto* v = find(key);
  if (v == nullptr) return out;
  if (!v->is_array()) type_error(*this, key, "an array of numbers");
  for (const auto& item : std::get<ConfigValue::Array>(v->data)) out.push_back(as_double(*this, key, item));
  return out;
}

std::vector<std::string> ConfigTable::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  const auto* v = find(key);
  if (v == nullptr) return out;
  if (!v->is_array()) type_error(*this, key, "an array of strings");
  for (const auto& item : std::get<ConfigValue::Array>(v->data)) {
    if (!item.is_string()) type_error(*this, key, "an array of strings");
    out.push_back(std::get<std::string>(item.data));
  }
  return out;
}

std::string ConfigTable::display_name() const {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += '.';
    out += p;
  }
  return out.empty() ? "<root>" : out;
}

const ConfigTable* ConfigDocument::table(const std::vector<std::string>& path) const {
  for (const auto& t : tables) {
    if (t.path == path) return &t;
  }
  return nullptr;
}

std::vector<const ConfigTable*> ConfigDocument::children(const std::string& prefix) const {
  std::vector<const ConfigTable*> out;
  for (const auto& t : tables) {
    if (t.path.size() == 2 && t.path[0] == prefix) out.push_back(&t);
  }
  return out;
}

ConfigDocument parse_config(const std::string& text, const std::string& source) {
  return Parser(text, source).run();
}

ConfigDocument load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace sqcsef
