#include "rhobound/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rhobound {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* wanted) {
  throw ConfigError("config key '" + key + "': '" + value + "' is not " +
                    wanted);
}

int parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "an integer");
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) {
    bad_value(key, value, "an integer");
  }
  if (x < INT_MIN || x > INT_MAX) bad_value(key, value, "a 32-bit integer");
  return static_cast<int>(x);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "a number");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size()) bad_value(key, value, "a number");
  return x;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-') bad_value(key, value, "an unsigned seed");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 0);
  if (errno != 0 || end != v.c_str() + v.size()) {
    bad_value(key, value, "an unsigned seed");
  }
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> split_list(const std::string& key,
                                    const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(value);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (out.empty() || trim(value).empty()) {
    throw ConfigError("config key '" + key + "': list must be nonempty");
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = value;
  }
  if (!cfg.has("schema")) {
    throw ConfigError("config is missing the mandatory 'schema' key");
  }
  if (cfg.get_int("schema") != kSchema) {
    throw ConfigError("unsupported config schema '" +
                      cfg.entries_.at("schema") + "' (expected " +
                      std::to_string(kSchema) + ")");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.entries_["schema"] = std::to_string(kSchema);
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (trim(key).empty()) throw ConfigError("config override: empty key");
  entries_[trim(key)] = trim(value);
}

bool ExperimentConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError("missing config key '" + key + "'");
  }
  return it->second;
}

std::string ExperimentConfig::get_string_or(const std::string& key,
                                            const std::string& fallback) const {
  return has(key) ? entries_.at(key) : fallback;
}

int ExperimentConfig::get_int(const std::string& key) const {
  return parse_int(key, get_string(key));
}

int ExperimentConfig::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ExperimentConfig::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double ExperimentConfig::get_double_or(const std::string& key,
                                       double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key) const {
  return parse_seed(key, get_string(key));
}

std::uint64_t ExperimentConfig::get_seed_or(const std::string& key,
                                            std::uint64_t fallback) const {
  return has(key) ? get_seed(key) : fallback;
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const std::string& tok : split_list(key, get_string(key))) {
    out.push_back(parse_int(key, tok));
  }
  return out;
}

std::vector<int> ExperimentConfig::get_int_list_or(
    const std::string& key, const std::vector<int>& fallback) const {
  return has(key) ? get_int_list(key) : fallback;
}

std::vector<double> ExperimentConfig::get_double_list(
    const std::string& key) const {
  std::vector<double> out;
  for (const std::string& tok : split_list(key, get_string(key))) {
    out.push_back(parse_double(key, tok));
  }
  return out;
}

std::vector<double> ExperimentConfig::get_double_list_or(
    const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_double_list(key) : fallback;
}

}  // namespace rhobound
