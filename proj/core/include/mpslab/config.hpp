#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpslab/mps.hpp"

// Flat key/value configuration documents: typed scalars, lists, and one
// level of [section] nesting (section keys flatten to "section.key").
// Parsing collects *all* errors instead of stopping at the first.
//
// Grammar (one construct per line):
//   # comment                    blank lines and trailing comments allowed
//   key = value
//   [section]
// Values: integers, reals, booleans (true/false), strings (bare or
// double-quoted), and lists [v1, v2, ...].

namespace mpslab {

struct ConfigError {
  int line = 0;
  std::string key;
  std::string message;
};

struct ConfigValue {
  enum class Kind { integer, real, boolean, string, list };
  Kind kind = Kind::string;
  std::int64_t i = 0;
  double r = 0.0;
  bool b = false;
  std::string s;
  std::vector<ConfigValue> items;
  int line = 0;

  std::string describe() const;
};

class ConfigDoc {
 public:
  static ConfigDoc parse_text(const std::string& text, std::vector<ConfigError>& errors);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const ConfigValue* find(const std::string& key) const;
  const std::map<std::string, ConfigValue>& entries() const { return entries_; }
  void set(const std::string& key, ConfigValue v) { entries_[key] = std::move(v); }

 private:
  std::map<std::string, ConfigValue> entries_;
};

// Validated experiment configuration; `params` holds the experiment-specific
// keys (already schema-checked by the runner).
struct ExperimentConfig {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "mpslab-out";
  long long dense_threshold = kDenseThreshold;
  int thread_count = 1;
  ConfigDoc params;

  // typed parameter access with documented defaults
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  double get_real(const std::string& key, double def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         std::vector<std::int64_t> def) const;
  std::vector<double> get_real_list(const std::string& key, std::vector<double> def) const;
  std::vector<std::string> get_string_list(const std::string& key,
                                           std::vector<std::string> def) const;
};

}  // namespace mpslab
