#ifndef COVERCERT_CONFIG_HPP
#define COVERCERT_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "covercert/errors.hpp"

namespace covercert {

using Json = nlohmann::json;

namespace detail {

// Cuts a '#' comment, honoring double-quoted strings and their escapes.
inline std::string strip_toml_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Net bracket depth outside strings; used to join multi-line array values.
inline int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return depth;
}

inline bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::vector<std::string> split_dotted_key(const std::string& s, std::size_t line_no) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      if (cur.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key segment");
      parts.push_back(cur);
      cur.clear();
    } else if (bare_key_char(c)) {
      cur += c;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw ConfigError("config line " + std::to_string(line_no) + ": bad key character '" +
                        std::string(1, c) + "'");
    }
  }
  if (cur.empty())
    throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
  parts.push_back(cur);
  return parts;
}

// Recursive-descent parser for a single TOML value: strings, booleans,
// integers, floats, arrays, and inline tables.
class TomlValueParser {
 public:
  TomlValueParser(const std::string& text, std::size_t line_no)
      : text_(text), line_(line_no) {}

  Json parse_all() {
    Json v = parse_value();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool consume_literal(const char* lit) {
    const std::size_t n = std::char_traits<char>::length(lit);
    if (text_.compare(pos_, n, lit) != 0) return false;
    pos_ += n;
    return true;
  }

  Json parse_value() {
    skip_ws();
    if (pos_ == text_.size()) fail("expected a value");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (consume_literal("true")) return true;
    if (consume_literal("false")) return false;
    return parse_number();
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ == text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    fail("unterminated string");
  }

  Json parse_array() {
    ++pos_;  // '['
    Json arr = Json::array();
    skip_ws();
    if (peek() == ']') { ++pos_; return arr; }
    while (true) {
      arr.push_back(parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        if (peek() == ']') { ++pos_; return arr; }  // trailing comma
        continue;
      }
      if (peek() == ']') { ++pos_; return arr; }
      fail("expected ',' or ']' in array");
    }
  }

  Json parse_inline_table() {
    ++pos_;  // '{'
    Json obj = Json::object();
    skip_ws();
    if (peek() == '}') { ++pos_; return obj; }
    while (true) {
      skip_ws();
      std::string key;
      while (pos_ < text_.size() && bare_key_char(text_[pos_])) key += text_[pos_++];
      if (key.empty()) fail("expected a key in inline table");
      skip_ws();
      if (peek() != '=') fail("expected '=' in inline table");
      ++pos_;
      obj[key] = parse_value();
      skip_ws();
      if (peek() == ',') { ++pos_; continue; }
      if (peek() == '}') { ++pos_; return obj; }
      fail("expected ',' or '}' in inline table");
    }
  }

  Json parse_number() {
    std::string tok;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ']' || c == '}') break;
      if (c != '_') tok += c;
      ++pos_;
    }
    if (tok.empty()) fail("expected a number");
    const bool is_float = tok.find_first_of(".eE") != std::string::npos &&
                          tok.find("0x") != 0;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used != tok.size()) fail("bad float '" + tok + "'");
        return v;
      }
      const long long v = std::stoll(tok, &used, 10);
      if (used != tok.size()) fail("bad integer '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
  }

  const std::string& text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// Walks a dotted path from the root, creating objects as needed.  When a
// segment holds an array of tables, the walk continues in its last element.
inline Json* descend_tables(Json& root, const std::vector<std::string>& path,
                            std::size_t upto, std::size_t line_no) {
  Json* cur = &root;
  for (std::size_t i = 0; i < upto; ++i) {
    Json& slot = (*cur)[path[i]];
    if (slot.is_null()) slot = Json::object();
    if (slot.is_array()) {
      if (slot.empty() || !slot.back().is_object())
        throw ConfigError("config line " + std::to_string(line_no) + ": '" + path[i] +
                          "' is not a table array");
      cur = &slot.back();
    } else if (slot.is_object()) {
      cur = &slot;
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": '" + path[i] +
                        "' already holds a value");
    }
  }
  return cur;
}

}  // namespace detail

// Parses the TOML subset used by the shipped configs: tables, table arrays,
// dotted bare keys, strings, booleans, integers, floats, arrays (which may
// span lines), and inline tables.  Dates and multi-line strings are not
// supported.
inline Json parse_toml(const std::string& text) {
  Json root = Json::object();
  Json* current = &root;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(detail::strip_toml_comment(raw));
    if (line.empty()) continue;

    if (line.size() >= 2 && line[0] == '[' && line[1] == '[') {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]")
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed table array");
      const auto path = detail::split_dotted_key(line.substr(2, line.size() - 4), line_no);
      Json* parent = detail::descend_tables(root, path, path.size() - 1, line_no);
      Json& slot = (*parent)[path.back()];
      if (slot.is_null()) slot = Json::array();
      if (!slot.is_array())
        throw ConfigError("config line " + std::to_string(line_no) + ": '" + path.back() +
                          "' is not a table array");
      slot.push_back(Json::object());
      current = &slot.back();
      continue;
    }

    if (line[0] == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed table header");
      const auto path = detail::split_dotted_key(line.substr(1, line.size() - 2), line_no);
      current = detail::descend_tables(root, path, path.size(), line_no);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto path = detail::split_dotted_key(line.substr(0, eq), line_no);
    std::string value_text = line.substr(eq + 1);

    // Arrays may continue on following lines until brackets balance.
    while (detail::bracket_balance(value_text) > 0) {
      if (!std::getline(in, raw))
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
      ++line_no;
      value_text += ' ';
      value_text += detail::strip_toml_comment(raw);
    }

    Json* table = detail::descend_tables(*current, path, path.size() - 1, line_no);
    const std::string& key = path.back();
    if (table->contains(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    (*table)[key] = detail::TomlValueParser(value_text, line_no).parse_all();
  }
  return root;
}

// Accepts either format: JSON when the first non-space byte opens an object,
// the TOML subset otherwise.
inline Json parse_config_text(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') {
      try {
        return Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("bad JSON config: ") + e.what());
      }
    }
    break;
  }
  return parse_toml(text);
}

inline Json load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("bad JSON config: ") + e.what());
    }
  }
  return parse_config_text(text);
}

}  // namespace covercert

#endif
