#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace osc {

// key = value lines with dotted keys. '#' starts a comment. A line "[name]" opens an experiment
// section; keys above the first section are defaults inherited by every section.
struct ConfigEntry {
  std::string value;
  int line = 0;
};

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::map<std::string, ConfigEntry> entries)
      : name_(std::move(name)), entries_(std::move(entries)) {}

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

  // Getters throw ConfigError naming the line and key.
  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  // Comma or whitespace separated.
  std::vector<double> nums(const std::string& key) const;
  std::vector<double> nums(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& key) const;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  const ConfigEntry& at(const std::string& key) const;

  std::string name_;
  std::map<std::string, ConfigEntry> entries_;
};

struct Config {
  ConfigSection globals;
  std::vector<ConfigSection> experiments;  // globals merged in
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

std::vector<std::string> split_list(const std::string& s);

}  // namespace osc
