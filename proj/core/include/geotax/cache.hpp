#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geotax::ingest {

struct CacheKey {
  std::uint64_t value = 0;
  std::string canonical;

  std::string hex() const;
  bool operator==(const CacheKey& other) const { return value == other.value; }
};

// Canonical string `op|version=<v>|k1=v1|k2=v2...` with parameters sorted by
// key, hashed with FNV-1a 64.
CacheKey make_cache_key(const std::string& op,
                        std::vector<std::pair<std::string, std::string>> params);

// Precedence: explicit flag, then GEOTAX_CACHE, then `.geotax-cache`.
std::filesystem::path resolve_cache_dir(const std::string& flag = {});

class Cache {
 public:
  explicit Cache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const CacheKey& key) const;

  std::optional<std::string> get(const CacheKey& key) const;
  // Atomic: written to a temporary file and renamed into place.
  void put(const CacheKey& key, const std::string& bytes) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace geotax::ingest
