#include "osc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "osc/types.hpp"

namespace osc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void ConfigSection::fail(const std::string& key, const std::string& what) const {
  std::string where;
  auto it = entries_.find(key);
  if (it != entries_.end() && it->second.line > 0) where = "line " + std::to_string(it->second.line) + ": ";
  const std::string sec = name_.empty() ? "" : " in [" + name_ + "]";
  throw ConfigError(where + key + sec + ": " + what);
}

const ConfigEntry& ConfigSection::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "missing required key");
  return it->second;
}

std::string ConfigSection::str(const std::string& key) const { return at(key).value; }

std::string ConfigSection::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double ConfigSection::num(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(at(key).value, v)) fail(key, "expected a number, got '" + at(key).value + "'");
  return v;
}

double ConfigSection::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

long ConfigSection::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = at(key).value;
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
  return v;
}

bool ConfigSection::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = at(key).value;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(key, "expected true or false, got '" + s + "'");
}

std::vector<double> ConfigSection::nums(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& w : split_list(at(key).value)) {
    double v = 0.0;
    if (!parse_double(w, v)) fail(key, "expected numbers, got '" + w + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> ConfigSection::nums(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? nums(key) : fallback;
}

std::vector<std::string> ConfigSection::words(const std::string& key) const { return split_list(at(key).value); }

Config parse_config(const std::string& text) {
  std::map<std::string, ConfigEntry> globals;
  std::vector<std::pair<std::string, std::map<std::string, ConfigEntry>>> sections;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const std::string at = "line " + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(at + "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) throw ConfigError(at + "empty section name");
      for (const auto& sec : sections) {
        if (sec.first == name) throw ConfigError(at + "duplicate section [" + name + "]");
      }
      sections.push_back({name, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(at + "empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_')) {
        throw ConfigError(at + "invalid character in key '" + key + "'");
      }
    }
    auto& target = sections.empty() ? globals : sections.back().second;
    if (target.count(key)) throw ConfigError(at + key + ": duplicate key");
    target[key] = {value, line};
  }
  Config c;
  c.globals = ConfigSection("", globals);
  for (auto& [name, entries] : sections) {
    auto merged = globals;
    for (auto& [k, v] : entries) merged[k] = v;
    c.experiments.emplace_back(name, std::move(merged));
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace osc
