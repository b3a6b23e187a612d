#include "mpslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace mpslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// strips an unquoted trailing comment
std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

bool parse_integer(const std::string& tok, std::int64_t& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_real(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

ConfigValue parse_scalar(const std::string& raw, int line) {
  ConfigValue v;
  v.line = line;
  const std::string tok = trim(raw);
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = ConfigValue::Kind::string;
    v.s = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.b = tok == "true";
    return v;
  }
  if (std::int64_t i = 0; parse_integer(tok, i)) {
    v.kind = ConfigValue::Kind::integer;
    v.i = i;
    v.r = static_cast<double>(i);
    return v;
  }
  if (double r = 0.0; parse_real(tok, r)) {
    v.kind = ConfigValue::Kind::real;
    v.r = r;
    return v;
  }
  v.kind = ConfigValue::Kind::string;
  v.s = tok;
  return v;
}

std::vector<std::string> split_top_level(const std::string& body) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_quote = false;
  for (char ch : body) {
    if (ch == '"') in_quote = !in_quote;
    if (ch == ',' && !in_quote) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace

std::string ConfigValue::describe() const {
  switch (kind) {
    case Kind::integer: return "integer " + std::to_string(i);
    case Kind::real: return "real " + std::to_string(r);
    case Kind::boolean: return b ? "boolean true" : "boolean false";
    case Kind::string: return "string \"" + s + "\"";
    case Kind::list: return "list of " + std::to_string(items.size());
  }
  return "?";
}

ConfigDoc ConfigDoc::parse_text(const std::string& text, std::vector<ConfigError>& errors) {
  ConfigDoc doc;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        errors.push_back({lineno, "", "malformed section header '" + body + "'"});
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) errors.push_back({lineno, "", "empty section name"});
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back({lineno, "", "expected 'key = value', got '" + body + "'"});
      continue;
    }
    std::string key = trim(body.substr(0, eq));
    std::string val = trim(body.substr(eq + 1));
    if (key.empty()) {
      errors.push_back({lineno, "", "missing key before '='"});
      continue;
    }
    if (!section.empty()) key = section + "." + key;
    if (doc.entries_.count(key)) {
      errors.push_back({lineno, key, "duplicate key"});
      continue;
    }
    ConfigValue v;
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') {
        errors.push_back({lineno, key, "unterminated list"});
        continue;
      }
      v.kind = ConfigValue::Kind::list;
      v.line = lineno;
      const std::string inner = val.substr(1, val.size() - 2);
      if (!trim(inner).empty()) {
        for (const auto& part : split_top_level(inner)) {
          if (trim(part).empty()) {
            errors.push_back({lineno, key, "empty list element"});
            continue;
          }
          v.items.push_back(parse_scalar(part, lineno));
        }
      }
    } else if (val.empty()) {
      errors.push_back({lineno, key, "missing value"});
      continue;
    } else {
      v = parse_scalar(val, lineno);
    }
    doc.entries_.emplace(std::move(key), std::move(v));
  }
  return doc;
}

const ConfigValue* ConfigDoc::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

const ConfigValue* lookup(const ConfigDoc& doc, const std::string& key) { return doc.find(key); }

}  // namespace

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind != ConfigValue::Kind::integer) {
    throw ValidationError("config key '" + key + "' must be an integer, got " + v->describe());
  }
  return v->i;
}

double ExperimentConfig::get_real(const std::string& key, double def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind != ConfigValue::Kind::integer && v->kind != ConfigValue::Kind::real) {
    throw ValidationError("config key '" + key + "' must be numeric, got " + v->describe());
  }
  return v->r;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind != ConfigValue::Kind::string) {
    throw ValidationError("config key '" + key + "' must be a string, got " + v->describe());
  }
  return v->s;
}

bool ExperimentConfig::get_bool(const std::string& key, bool def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind != ConfigValue::Kind::boolean) {
    throw ValidationError("config key '" + key + "' must be a boolean, got " + v->describe());
  }
  return v->b;
}

std::vector<std::int64_t> ExperimentConfig::get_int_list(const std::string& key,
                                                         std::vector<std::int64_t> def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind == ConfigValue::Kind::integer) return {v->i};
  if (v->kind != ConfigValue::Kind::list) {
    throw ValidationError("config key '" + key + "' must be an integer list, got " + v->describe());
  }
  std::vector<std::int64_t> out;
  for (const auto& item : v->items) {
    if (item.kind != ConfigValue::Kind::integer) {
      throw ValidationError("config key '" + key + "' has a non-integer element");
    }
    out.push_back(item.i);
  }
  return out;
}

std::vector<double> ExperimentConfig::get_real_list(const std::string& key,
                                                    std::vector<double> def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind == ConfigValue::Kind::integer || v->kind == ConfigValue::Kind::real) return {v->r};
  if (v->kind != ConfigValue::Kind::list) {
    throw ValidationError("config key '" + key + "' must be a numeric list, got " + v->describe());
  }
  std::vector<double> out;
  for (const auto& item : v->items) {
    if (item.kind != ConfigValue::Kind::integer && item.kind != ConfigValue::Kind::real) {
      throw ValidationError("config key '" + key + "' has a non-numeric element");
    }
    out.push_back(item.r);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::get_string_list(const std::string& key,
                                                           std::vector<std::string> def) const {
  const ConfigValue* v = lookup(params, key);
  if (!v) return def;
  if (v->kind == ConfigValue::Kind::string) return {v->s};
  if (v->kind != ConfigValue::Kind::list) {
    throw ValidationError("config key '" + key + "' must be a string list, got " + v->describe());
  }
  std::vector<std::string> out;
  for (const auto& item : v->items) {
    if (item.kind == ConfigValue::Kind::string) {
      out.push_back(item.s);
    } else if (item.kind == ConfigValue::Kind::integer) {
      out.push_back(std::to_string(item.i));
    } else if (item.kind == ConfigValue::Kind::real) {
      std::ostringstream os;
      os << item.r;
      out.push_back(os.str());
    } else {
      throw ValidationError("config key '" + key + "' has an unsupported element");
    }
  }
  return out;
}

}  // namespace mpslab
