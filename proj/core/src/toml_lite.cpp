#include "vcmc/toml_lite.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace vcmc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw std::invalid_argument("toml parse error at line " + std::to_string(line) + ": " +
                              message);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

std::vector<std::string> split_dotted_key(const std::string& key, int line) {
  std::vector<std::string> parts;
  std::istringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = strip(part);
    if (part.empty()) fail(line, "empty key segment in '" + key + "'");
    parts.push_back(part);
  }
  if (parts.empty()) fail(line, "empty key");
  return parts;
}

json parse_scalar(const std::string& raw, int line) {
  const std::string v = strip(raw);
  if (v.empty()) fail(line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size() + 1) {
        ++i;
        switch (v[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line, "unsupported escape in string");
        }
      } else {
        out += v[i];
      }
    }
    return json(out);
  }
  if (v == "true") return json(true);
  if (v == "false") return json(false);

  // Numbers: prefer integers when the text has no fraction or exponent.
  const bool looks_float = v.find_first_of(".eE") != std::string::npos &&
                           v.find_first_of("0123456789") != std::string::npos;
  try {
    std::size_t used = 0;
    if (!looks_float) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return json(i);
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return json(d);
  } catch (const std::exception&) {
    // fall through
  }
  fail(line, "cannot parse value '" + v + "'");
}

json parse_value(const std::string& raw, int line) {
  const std::string v = strip(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') fail(line, "unterminated array");
    json arr = json::array();
    std::string body = v.substr(1, v.size() - 2);
    std::string item;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!strip(item).empty()) arr.push_back(parse_scalar(item, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!strip(item).empty()) arr.push_back(parse_scalar(item, line));
    return arr;
  }
  return parse_scalar(v, line);
}

json* descend(json& root, const std::vector<std::string>& path, int line) {
  json* node = &root;
  for (const auto& part : path) {
    if (!node->is_object()) fail(line, "key path collides with a non-table value");
    node = &(*node)[part];
  }
  return node;
}

}  // namespace

json parse_toml_lite(const std::string& text) {
  json root = json::object();
  std::vector<std::string> table_path;

  std::istringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated table header");
      if (line.size() > 2 && line[1] == '[') fail(line_no, "arrays of tables are not supported");
      table_path = split_dotted_key(line.substr(1, line.size() - 2), line_no);
      json* node = descend(root, table_path, line_no);
      if (!node->is_object() && !node->is_null()) {
        fail(line_no, "table header collides with an existing value");
      }
      if (node->is_null()) *node = json::object();
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    auto key_path = split_dotted_key(line.substr(0, eq), line_no);
    const json value = parse_value(line.substr(eq + 1), line_no);

    std::vector<std::string> full = table_path;
    full.insert(full.end(), key_path.begin(), key_path.end());
    json* node = descend(root, full, line_no);
    if (!node->is_null()) fail(line_no, "duplicate key '" + full.back() + "'");
    *node = value;
  }
  return root;
}

}  // namespace vcmc
