#include "geotax/cache.hpp"

#include <algorithm>
#include <cstdlib>

#include "geotax/error.hpp"
#include "geotax/hash.hpp"
#include "geotax/io.hpp"
#include "geotax/version.hpp"

namespace geotax::ingest {

std::string CacheKey::hex() const { return hex64(value); }

CacheKey make_cache_key(const std::string& op,
                        std::vector<std::pair<std::string, std::string>> params) {
  std::sort(params.begin(), params.end());
  std::string canonical = op + "|version=" + kVersion;
  for (const auto& [k, v] : params) canonical += "|" + k + "=" + v;
  return {fnv1a64(canonical), canonical};
}

std::filesystem::path resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GEOTAX_CACHE"); env && *env) return env;
  return ".geotax-cache";
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Cache::path_for(const CacheKey& key) const { return dir_ / (key.hex() + ".bin"); }

std::optional<std::string> Cache::get(const CacheKey& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  return read_file(path);
}

void Cache::put(const CacheKey& key, const std::string& bytes) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create cache directory " + dir_.string());
  write_file_atomic(path_for(key), bytes);
}

}  // namespace geotax::ingest
