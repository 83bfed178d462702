#pragma once

#include <map>
#include <optional>
#include <string>

namespace mco {

// Flat key-value run configuration files:
//   one `key = value` (or `key value`) pair per line, '#' starts a comment.
// Keys mirror the command-line flags one to one (without the leading dashes).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mco
