#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lakeoc/errors.hpp"

namespace lakeoc::cli {

struct ConfigError : SpecificationError {
  using SpecificationError::SpecificationError;
};

/// Parsed key = value configuration grouped into [section] blocks.
/// Parsing is strict: malformed lines, duplicate keys and (at validation
/// time) unknown sections or keys are all errors, so a typo can never be
/// silently ignored.
class Config {
 public:
  void set(const std::string& section, const std::string& key,
           const std::string& value, int line);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double num_or(const std::string& section, const std::string& key,
                double fallback) const;
  int int_or(const std::string& section, const std::string& key,
             int fallback) const;
  bool bool_or(const std::string& section, const std::string& key,
               bool fallback) const;

  /// Reject any section or key outside the allowed schema.
  void validate(
      const std::map<std::string, std::set<std::string>>& schema) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

}  // namespace lakeoc::cli
