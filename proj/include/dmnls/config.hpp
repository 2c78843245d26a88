#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmnls/integrator.hpp"

namespace dmnls {

/// Any problem with a configuration document or its values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat `key = value` document: `#` starts a comment, keys are dotted
/// (`grid.n`, `time.dt`, ...). Duplicate keys are rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Directory of the source file; relative paths in values resolve against it.
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path p) { base_dir_ = std::move(p); }

  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_ = ".";
};

/// Keys accepted in a run configuration.
const std::vector<std::string>& known_keys();

/// Keys that may carry comma-separated lists in a sweep.
const std::vector<std::string>& sweep_keys();

/// Builds and validates a SimConfig; throws ConfigError naming the key.
SimConfig to_sim_config(const KeyValueConfig& kv);

/// `output.name`, default "run".
std::string output_name(const KeyValueConfig& kv);

/// Cartesian product over list-valued sweep keys, in key order. A document
/// without lists yields itself. Lists on other keys are rejected.
std::vector<KeyValueConfig> expand_sweep(const KeyValueConfig& kv);

}  // namespace dmnls
