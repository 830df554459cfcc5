#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geotax {

// Flat `key = value` configuration. Keys may be grouped with dotted prefixes
// (`stability.n_splits`) or with `[section]` lines, which prefix the keys that
// follow. `#` starts a comment.
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  // Throws ConfigError naming the key when missing.
  const std::string& require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  double require_double(const std::string& key) const;
  std::int64_t require_int(const std::string& key) const;

  void set(const std::string& key, std::string value);
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  // Line the key was read from, 0 when set programmatically.
  int line_of(const std::string& key) const;

  // Sorted `key = value` lines; parse(dump()) reproduces the entries.
  std::string dump() const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
};

}  // namespace geotax
