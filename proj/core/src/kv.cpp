#include "geotax/kv.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "geotax/error.hpp"
#include "geotax/io.hpp"

namespace geotax {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line,
                            const char* expected) {
  std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
  fail(ErrorCode::ConfigError,
       "key '" + key + "'" + where + ": expected " + expected + ", got '" + value + "'");
}

}  // namespace

KvConfig KvConfig::parse(std::string_view text) {
  KvConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": malformed section");
      section = trim(std::string_view(line).substr(1, line.size() - 2)) + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError,
           "line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = section + trim(std::string_view(line).substr(0, eq));
    if (key.empty() || key == section)
      fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": empty key");
    if (cfg.entries_.count(key)) {
      fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" +
                                       key + "' (first on line " +
                                       std::to_string(cfg.lines_[key]) + ")");
    }
    cfg.entries_[key] = trim(std::string_view(line).substr(eq + 1));
    cfg.lines_[key] = line_no;
    if (end == text.size()) break;
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) fail(ErrorCode::ConfigError, e.what());
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

bool KvConfig::contains(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& KvConfig::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::ConfigError, "missing required key '" + key + "'");
  return it->second;
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) bad_value(key, *v, line_of(key), "a number");
  return out;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) bad_value(key, *v, line_of(key), "an integer");
  return out;
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    bad_value(key, *v, line_of(key), "an unsigned integer");
  return out;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  bad_value(key, *v, line_of(key), "a boolean");
}

std::vector<double> KvConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size())
      bad_value(key, *v, line_of(key), "a comma-separated list of numbers");
    out.push_back(x);
  }
  return out;
}

double KvConfig::require_double(const std::string& key) const {
  require(key);
  return get_double(key, 0.0);
}

std::int64_t KvConfig::require_int(const std::string& key) const {
  require(key);
  return get_int(key, 0);
}

void KvConfig::set(const std::string& key, std::string value) {
  entries_[key] = std::move(value);
  lines_.erase(key);
}

int KvConfig::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

std::string KvConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace geotax
