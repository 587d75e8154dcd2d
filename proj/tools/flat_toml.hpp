#pragma once

// Reader for the flat subset of TOML used by run configs: [section] headers,
// `key = value` pairs, '#' comments.  Values are strings ("..."), booleans,
// numbers, or one-line arrays of numbers.  Keys are stored as section.key.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "s2lab/core.hpp"

namespace s2lab::toml {

class Table {
 public:
  [[nodiscard]] bool contains(const std::string& key) const { return raw_.count(key) != 0; }

  [[nodiscard]] std::optional<std::string> string(const std::string& key) const
  {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    const std::string& v = it->second;
    if (v.size() < 2 || v.front() != '"' || v.back() != '"') throw ValidationError(key + ": expected a string");
    return v.substr(1, v.size() - 2);
  }

  [[nodiscard]] std::optional<double> number(const std::string& key) const
  {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return parse_number(key, it->second);
  }

  [[nodiscard]] std::optional<bool> boolean(const std::string& key) const
  {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ValidationError(key + ": expected true or false");
  }

  [[nodiscard]] std::optional<std::vector<double>> numbers(const std::string& key) const
  {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    const std::string& v = it->second;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ValidationError(key + ": expected an array");
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(parse_number(key, item));
    }
    return out;
  }

  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return raw_; }

  friend Table parse(std::string_view text);

  static std::string trim(std::string_view s)
  {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
  }

 private:
  static double parse_number(const std::string& key, const std::string& text)
  {
    std::string t;
    for (char c : text)
      if (c != '_') t += c;
    double v = 0.0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ValidationError(key + ": expected a number, got '" + text + "'");
    return v;
  }

  std::map<std::string, std::string> raw_;
};

inline Table parse(std::string_view text)
{
  Table t;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    // Strip a comment unless the '#' sits inside a string.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string s = Table::trim(line);
    if (s.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ValidationError(where + ": malformed section header");
      section = Table::trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = Table::trim(std::string_view(s).substr(0, eq));
    const std::string value = Table::trim(std::string_view(s).substr(eq + 1));
    if (key.empty() || value.empty()) throw ValidationError(where + ": empty key or value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (t.raw_.count(full)) throw ValidationError(where + ": duplicate key " + full);
    t.raw_[full] = value;
  }
  return t;
}

inline Table parse_file(const std::string& path)
{
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

}  // namespace s2lab::toml
