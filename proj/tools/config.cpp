#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lakeoc::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& section, const std::string& key,
                    const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + key + ": not a number: '" +
                      value + "'");
  return v;
}

}  // namespace

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value, int line) {
  auto& sec = sections_[section];
  if (sec.count(key))
    throw ConfigError("line " + std::to_string(line) + ": duplicate key '" +
                      key + "' in [" + section + "]");
  sec[key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::string Config::get(const std::string& section,
                        const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key))
    throw ConfigError("missing required key '" + key + "' in [" + section +
                      "]");
  return it->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::num_or(const std::string& section, const std::string& key,
                      double fallback) const {
  if (!has(section, key)) return fallback;
  return parse_number(section, key, get(section, key));
}

int Config::int_or(const std::string& section, const std::string& key,
                   int fallback) const {
  if (!has(section, key)) return fallback;
  double v = parse_number(section, key, get(section, key));
  int i = static_cast<int>(v);
  if (v != i)
    throw ConfigError("[" + section + "] " + key + ": expected an integer");
  return i;
}

bool Config::bool_or(const std::string& section, const std::string& key,
                     bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" +
                    v + "'");
}

void Config::validate(
    const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [section, keys] : sections_) {
    auto it = schema.find(section);
    if (it == schema.end())
      throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!it->second.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside of any section");
    cfg.set(section, key, value, lineno);
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace lakeoc::cli
