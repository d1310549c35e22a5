#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rhobound/errors.hpp"

namespace rhobound {

// Declarative experiment configuration: one `key = value` pair per line,
// `#` starts a comment, blank lines are skipped.  Files must carry
// `schema = 1` so stale configs fail loudly instead of silently running with
// reinterpreted keys.  Command-line overrides arrive through set() and
// replace file values; within a single file a repeated key is an error.
class ExperimentConfig {
 public:
  static constexpr int kSchema = 1;

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  // The empty config (still schema-stamped); every key at its default.
  static ExperimentConfig defaults();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Throwing accessors; the *_or forms substitute when the key is absent.
  // A present-but-malformed value throws either way.
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::uint64_t get_seed(const std::string& key) const;
  std::uint64_t get_seed_or(const std::string& key,
                            std::uint64_t fallback) const;
  // Comma-separated, at least one element.
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<int> get_int_list_or(const std::string& key,
                                   const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<double> get_double_list_or(
      const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace rhobound
