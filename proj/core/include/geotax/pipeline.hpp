#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geotax/kv.hpp"

namespace geotax::ingest {

class Transport;

struct RunOptions {
  std::filesystem::path out_dir = "runs";
  std::string cache_dir;          // resolved with resolve_cache_dir
  Transport* transport = nullptr;  // null: offline
};

struct RunOutput {
  std::filesystem::path run_dir;
  std::vector<std::filesystem::path> files;
  std::string config_hash;
};

// Hex FNV-1a of the canonical config dump.
std::string config_hash(const KvConfig& config);

// Runs the experiment named by `experiment` (stability, spin, walk, mine,
// texture) and writes report.json plus CSV tables and SVG plots into
// out_dir/<run.name or experiment>-<config hash>. report.json carries the
// provenance block: tool version, config echo, config hash, seeds and cache
// keys. Missing or malformed keys raise ConfigError naming the key and line.
RunOutput run_pipeline(const KvConfig& config, const RunOptions& options);
RunOutput run_pipeline(const std::filesystem::path& config_path, const RunOptions& options);

// Rebuilds the config echoed in a report.json provenance block.
KvConfig config_from_provenance(std::string_view report_json);

// Report tables regenerated from committed fixtures of published values.
// Input columns: Architecture,Model,Ratio,Reduction (percent). Output
// columns: Model,Ratio,Reduction %,Regime,Consistent, where Consistent checks
// 1 - ratio against the stated reduction to 0.15 points.
std::string regime_report(std::string_view fixture_csv);
// Input columns: Condition,RC RDM,RC Composite with Real first and Random
// last. Output adds Recovery for both score columns.
std::string texture_report(std::string_view fixture_csv);

}  // namespace geotax::ingest
