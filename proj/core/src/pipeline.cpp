#include "geotax/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geotax/cache.hpp"
#include "geotax/dynamics.hpp"
#include "geotax/error.hpp"
#include "geotax/fasta.hpp"
#include "geotax/genome.hpp"
#include "geotax/hash.hpp"
#include "geotax/io.hpp"
#include "geotax/mine.hpp"
#include "geotax/procrustes.hpp"
#include "geotax/stability.hpp"
#include "geotax/texture.hpp"
#include "geotax/version.hpp"
#include "geotax/walks.hpp"

namespace geotax::ingest {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad_key(const KvConfig& cfg, const std::string& key, const std::string& message) {
  const int line = cfg.line_of(key);
  std::string where = "key '" + key + "'";
  if (line > 0) where += " (line " + std::to_string(line) + ")";
  fail(ErrorCode::ConfigError, where + ": " + message);
}

std::size_t get_size(const KvConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) bad_key(cfg, key, "must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> get_sizes(const KvConfig& cfg, const std::string& key,
                                   std::vector<std::size_t> fallback) {
  if (!cfg.contains(key)) return fallback;
  std::vector<std::size_t> out;
  for (double v : cfg.get_doubles(key, {})) {
    if (v < 0 || v != std::floor(v)) bad_key(cfg, key, "expected nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) bad_key(cfg, key, "list is empty");
  return out;
}

// Fingerprint of an input file for cache keys.
std::string file_digest(const std::string& path) { return hex64(fnv1a64(read_file(path))); }

struct Run {
  const KvConfig& cfg;
  const RunOptions& opt;
  std::uint64_t seed;
  std::vector<SeedSpec> seeds;
  std::vector<CacheKey> cache_keys;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  Json results = Json::object();

  SeedSpec seed_for(const std::string& stream) {
    SeedSpec s{seed, stream};
    seeds.push_back(s);
    return s;
  }

  Cache cache() const { return Cache(resolve_cache_dir(opt.cache_dir)); }
};

stability::SplitConfig split_config(const KvConfig& cfg) {
  stability::SplitConfig s;
  s.n_splits = get_size(cfg, "stability.n_splits", s.n_splits);
  s.max_samples = get_size(cfg, "stability.max_samples", s.max_samples);
  s.n_bootstrap = get_size(cfg, "stability.n_bootstrap", s.n_bootstrap);
  s.anchor_count = get_size(cfg, "stability.anchor_count", s.anchor_count);
  s.rank_normalize_anchors = cfg.get_bool("stability.rank_normalize_anchors", s.rank_normalize_anchors);
  const auto variant = cfg.get_string("stability.variant", "anchor");
  if (variant == "anchor") {
    s.variant = stability::CompositeVariant::Anchor;
  } else if (variant == "perturbation") {
    s.variant = stability::CompositeVariant::Perturbation;
  } else {
    bad_key(cfg, "stability.variant", "expected anchor or perturbation");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("stability settings: ") + e.what());
  }
  return s;
}

FetchSpec fetch_spec(const KvConfig& cfg, std::uint64_t seed) {
  FetchSpec f;
  try {
    f.source = source_from_string(cfg.get_string("fetch.source", "synthetic"));
  } catch (const Error&) {
    bad_key(cfg, "fetch.source", "expected genome-rest, local-fasta or synthetic");
  }
  f.assembly = cfg.get_string("fetch.assembly", f.assembly);
  f.chromosome = cfg.get_string("fetch.chromosome", f.chromosome);
  f.start = cfg.get_u64("fetch.start", 0);
  f.end = cfg.get_u64("fetch.end", f.source == Source::Synthetic ? 1000 : 0);
  f.max_n_fraction = cfg.get_double("fetch.max_n_fraction", f.max_n_fraction);
  f.telomeric_margin = cfg.get_double("fetch.margin", f.telomeric_margin);
  const auto policy = cfg.get_string("fetch.n_policy", "reject");
  if (policy == "reject") {
    f.n_policy = NPolicy::Reject;
  } else if (policy == "replace") {
    f.n_policy = NPolicy::Replace;
  } else {
    bad_key(cfg, "fetch.n_policy", "expected reject or replace");
  }
  f.n_seed = cfg.get_u64("fetch.n_seed", seed);
  f.synthetic_seed = seed;
  f.synthetic_fallback = cfg.get_bool("fetch.fallback", false);
  if (f.source == Source::LocalFasta) f.fasta_path = cfg.require("fetch.fasta");
  try {
    f.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("fetch settings: ") + e.what());
  }
  return f;
}

Json metrics_json(const stability::Metrics& m) {
  return {{"rdm_similarity", m.rdm_similarity},
          {"sample_split", m.sample_split},
          {"feature_split", m.feature_split},
          {"anchor_stability", m.anchor_stability},
          {"perturbation_stability", m.perturbation_stability},
          {"perturbation_magnitude", m.perturbation_magnitude},
          {"composite", m.composite}};
}

Json profile_json(const walks::LipschitzProfile& p) {
  return {{"mean", p.mean},
          {"max", p.max},
          {"smoothness_ratio", p.smoothness_ratio},
          {"spike_threshold", p.spike_threshold},
          {"spikes", p.spikes}};
}

void run_stability(Run& run) {
  const auto& cfg = run.cfg;
  const auto clean = read_embeddings(cfg.require("stability.clean"));
  const auto pert = read_embeddings(cfg.require("stability.perturbed"));
  std::vector<double> deltas;
  if (const auto path = cfg.get("stability.deltas")) deltas = read_csv(*path).col(0);
  const auto name = cfg.get_string("stability.name", "perturbation");
  const auto report =
      stability::evaluate(clean, pert, deltas, split_config(cfg), run.seed_for("pipeline/stability"), name);
  run.results["mean"] = metrics_json(report.mean);
  run.results["std"] = metrics_json(report.std);
  run.results["degenerate_correlations"] = report.provenance.degenerate_correlations;
  run.files.emplace_back("stability.csv", stability::to_csv({&report, 1}));
  run.files.emplace_back("stability.ndjson", stability::to_ndjson({&report, 1}));
}

void run_spin(Run& run) {
  const auto& cfg = run.cfg;
  const auto clean = read_embeddings(cfg.require("spin.clean"));
  const auto pert = read_embeddings(cfg.require("spin.perturbed"));
  const auto name = cfg.get_string("spin.name", "perturbation");
  const auto r = procrustes::procrustes_align(clean.values(), pert.values());
  const auto label = procrustes::classify_regime(r);
  run.results = {{"raw_error", r.raw_error},     {"aligned_error", r.aligned_error},
                 {"ratio", r.ratio},             {"reduction_percent", label.rho_percent},
                 {"scale", r.scale},             {"exact_match", r.exact_match},
                 {"regime", procrustes::to_string(label.label)}};
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.2f,%s\n", name.c_str(), r.raw_error, r.aligned_error,
                r.ratio, label.rho_percent, procrustes::to_string(label.label));
  run.files.emplace_back("spin.csv", std::string("Perturbation,Raw Error,Aligned Error,Ratio,Reduction %,Regime\n") + buf);
}

SymbolSequence wildtype(Run& run) {
  const FetchSpec spec = fetch_spec(run.cfg, run.seed);
  const Cache cache = run.cache();
  GenomeClient client(run.opt.transport, &cache);
  auto result = client.fetch(spec);
  if (spec.source == Source::GenomeRest) run.cache_keys.push_back(result.key);
  run.results["wildtype"] = {{"source", to_string(spec.source)},
                             {"length", result.sequence.size()},
                             {"ambiguous", result.ambiguous},
                             {"synthetic", result.synthetic}};
  return std::move(result.sequence);
}

void run_walk(Run& run) {
  const auto& cfg = run.cfg;
  const auto kind = cfg.get_string("walk.kind", "mutation");
  walks::Walk walk;
  Matrix emb;
  if (kind == "mutation") {
    const SymbolSequence wt = wildtype(run);
    const std::size_t len = wt.size();
    walks::CoreRegion core{get_size(cfg, "walk.core_start", len / 4), get_size(cfg, "walk.core_end", 3 * len / 4)};
    std::optional<walks::Landmark> landmark;
    if (cfg.contains("walk.landmark_position")) {
      const auto base = cfg.get_string("walk.landmark_base", "A");
      if (base.size() != 1) bad_key(cfg, "walk.landmark_base", "expected a single base");
      landmark = walks::Landmark{get_size(cfg, "walk.landmark_position", 0), base[0]};
    }
    walk = walks::build_mutation_walk(wt, get_size(cfg, "walk.n_mutations", 100), core,
                                      run.seed_for("pipeline/walk"), landmark);
    run.files.emplace_back("walk.fasta", format_fasta(walks::to_fasta(walk), 80));
    if (!cfg.contains("walk.embeddings"))
      emb = texture::kmer_embedder(get_sizes(cfg, "walk.k", {3}))(walk.steps);
  } else if (kind == "interpolation") {
    const auto system = cfg.get_string("walk.system", "oscillator");
    const std::size_t length = get_size(cfg, "walk.length", dynamics::kDefaultLength);
    dynamics::Trajectory a, b;
    if (system == "oscillator") {
      Rng rng(run.seed_for("pipeline/walk/endpoints"));
      a = dynamics::gen_oscillator(dynamics::sample_oscillator(rng), length);
      b = dynamics::gen_oscillator(dynamics::sample_oscillator(rng), length);
    } else if (system == "lorenz") {
      a = dynamics::gen_lorenz(run.seed_for("pipeline/walk/a"), length);
      b = dynamics::gen_lorenz(run.seed_for("pipeline/walk/b"), length);
    } else {
      bad_key(cfg, "walk.system", "expected oscillator or lorenz");
    }
    const std::vector<dynamics::Trajectory> pair = {a, b};
    const auto range = dynamics::fit_global_range(pair);
    const std::size_t bins = get_size(cfg, "walk.n_bins", dynamics::kDefaultBins);
    walk = walks::build_interpolation_walk(a, b, range, get_size(cfg, "walk.n_steps", 101), bins);
    if (!cfg.contains("walk.embeddings")) {
      // Desk embedding: the reconstructed trajectory values, flattened.
      for (std::size_t i = 0; i < walk.steps.size(); ++i) {
        const auto values = dynamics::undiscretize(walk.steps[i], range, bins).values;
        if (i == 0) emb = Matrix(walk.steps.size(), values.data().size());
        std::copy(values.data().begin(), values.data().end(), emb.row(i).begin());
      }
    }
  } else {
    bad_key(cfg, "walk.kind", "expected mutation or interpolation");
  }
  if (const auto path = cfg.get("walk.embeddings")) {
    emb = read_embeddings(*path).values();
    if (emb.rows() != walk.steps.size()) bad_key(cfg, "walk.embeddings", "row count does not match the walk");
  }
  const auto metric = cfg.get_string("walk.metric", "l2");
  walks::LipschitzProfile profile;
  if (metric == "l2") {
    profile = walks::lipschitz_l2(emb);
  } else if (metric == "cosine") {
    profile = walks::lipschitz_cosine(emb);
  } else {
    bad_key(cfg, "walk.metric", "expected l2 or cosine");
  }
  run.results["kind"] = kind;
  run.results["steps"] = walk.steps.size();
  run.results["metric"] = metric;
  run.results["profile"] = profile_json(profile);
  if (walk.landmark_index) run.results["landmark_step"] = *walk.landmark_index;
  const std::size_t k = std::min<std::size_t>(3, std::min(emb.rows(), emb.cols()));
  const auto pca = walks::pca_trajectory(emb, k);
  run.results["pca_explained_variance_ratio"] = pca.explained_variance_ratio;
  run.files.emplace_back("profile.csv", walks::profile_csv(profile));
  run.files.emplace_back("trajectory.svg", walks::svg_polyline(pca.scores, 480, 480, kind + " walk"));
}

Json estimate_json(const mine::MIEstimate& e) {
  return {{"per_seed", e.per_seed}, {"mean", e.mean},     {"std", e.std},
          {"baseline", e.baseline}, {"excess", e.excess}, {"ceiling", e.ceiling},
          {"normalized", e.normalized}};
}

mine::MIEstimate estimate_from_json(const Json& j) {
  mine::MIEstimate e;
  e.per_seed = j.at("per_seed").get<std::vector<double>>();
  e.mean = j.at("mean").get<double>();
  e.std = j.at("std").get<double>();
  e.baseline = j.at("baseline").get<double>();
  e.excess = j.at("excess").get<double>();
  e.ceiling = j.at("ceiling").get<double>();
  e.normalized = j.at("normalized").get<double>();
  return e;
}

void run_mine(Run& run) {
  const auto& cfg = run.cfg;
  std::vector<std::uint64_t> seeds;
  for (double s : cfg.get_doubles("mine.seeds", {320, 420, 520, 620, 720})) seeds.push_back(static_cast<std::uint64_t>(s));
  std::string csv;
  char buf[256];
  if (cfg.get_bool("mine.sanity", false)) {
    auto mc = mine::sanity_mine();
    mc.net.epochs = get_size(cfg, "mine.epochs", mc.net.epochs);
    const auto rhos = cfg.get_doubles("mine.rhos", {0.0, 0.3, 0.6, 0.9});
    const auto cases = mine::sanity_suite(rhos, get_size(cfg, "mine.n", 2000), mc, seeds,
                                          run.seed_for("pipeline/mine/sanity").seed);
    csv = "rho,truth,estimate,tolerance,pass\n";
    Json arr = Json::array();
    for (const auto& c : cases) {
      arr.push_back({{"rho", c.rho}, {"truth", c.truth}, {"estimate", estimate_json(c.estimate)},
                     {"tolerance", c.tolerance}, {"pass", c.pass}, {"improved", c.improved}});
      std::snprintf(buf, sizeof buf, "%.2f,%.4f,%.4f,%.4f,%s\n", c.rho, c.truth, c.estimate.mean, c.tolerance,
                    c.pass ? "true" : "false");
      csv += buf;
    }
    run.results["sanity"] = arr;
  } else {
    const auto xpath = cfg.require("mine.x");
    const auto zpath = cfg.require("mine.z");
    auto mc = mine::default_mine();
    mc.net.epochs = get_size(cfg, "mine.epochs", mc.net.epochs);
    mc.pca_dim = get_size(cfg, "mine.pca_dim", mc.pca_dim);
    const double sigma = cfg.get_double("mine.ceiling_sigma", 0.0);
    const bool baseline = cfg.get_bool("mine.baseline", true);
    const SeedSpec data_seed = run.seed_for("pipeline/mine/data");
    std::string seed_list;
    for (auto s : seeds) seed_list += std::to_string(s) + ",";
    char sig[32];
    std::snprintf(sig, sizeof sig, "%.17g", sigma);
    const CacheKey key = make_cache_key(
        "mine_estimate", {{"x", file_digest(xpath)}, {"z", file_digest(zpath)},
                          {"epochs", std::to_string(mc.net.epochs)}, {"pca_dim", std::to_string(mc.pca_dim)},
                          {"seeds", seed_list}, {"data_seed", std::to_string(data_seed.seed)},
                          {"baseline", baseline ? "1" : "0"}, {"ceiling_sigma", sig}});
    run.cache_keys.push_back(key);
    const Cache cache = run.cache();
    mine::MIEstimate est;
    if (const auto hit = cache.get(key)) {
      est = estimate_from_json(Json::parse(*hit));
    } else {
      const Matrix x = read_embeddings(xpath).values();
      const Matrix z = read_embeddings(zpath).values();
      est = mine::mine_estimate(x, z, mc, seeds);
      double base = 0.0, ceil = 0.0;
      if (baseline) base = mine::random_baseline(x, z.cols(), mc, seeds, data_seed.seed).mean;
      if (sigma > 0.0) ceil = mine::ceiling_calibration(x, sigma, mc, seeds, data_seed.seed).mean;
      mine::apply_calibration(est, base, ceil);
      cache.put(key, estimate_json(est).dump());
    }
    run.results["estimate"] = estimate_json(est);
    csv = "mean,std,baseline,excess,ceiling,normalized\n";
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", est.mean, est.std, est.baseline, est.excess,
                  est.ceiling, est.normalized);
    csv += buf;
  }
  run.files.emplace_back("mine.csv", csv);
}

void run_texture(Run& run) {
  const auto& cfg = run.cfg;
  const auto source = cfg.get_string("texture.source", "synthetic");
  std::vector<SymbolSequence> corpus;
  if (source == "synthetic") {
    corpus = texture::synthetic_corpus(get_size(cfg, "texture.count", 200), get_size(cfg, "texture.length", 1000),
                                       run.seed_for("pipeline/texture/corpus"));
  } else if (source == "fasta") {
    FetchSpec policy;
    policy.n_policy = NPolicy::Replace;
    policy.n_seed = run.seed_for("pipeline/texture/ambiguous").seed;
    for (const auto& r : parse_fasta(cfg.require("texture.fasta"))) corpus.push_back(apply_n_policy(r.sequence, policy));
  } else {
    bad_key(cfg, "texture.source", "expected synthetic or fasta");
  }
  const auto ks = get_sizes(cfg, "texture.k", {1, 2, 3});
  const auto rows = texture::texture_experiment(corpus, texture::projected_kmer_embedder(ks), split_config(cfg),
                                                run.seed_for("pipeline/texture"));
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"condition", r.condition}, {"rc_rdm", r.rc_rdm}, {"rc_composite", r.rc_composite},
                   {"recovery", r.recovery}});
  run.results["sequences"] = corpus.size();
  run.results["k"] = ks;
  run.results["conditions"] = arr;
  run.files.emplace_back("texture.csv", texture::texture_table_csv(rows));
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_number(const std::string& cell) {
  std::string s = cell;
  if (!s.empty() && s.back() == '%') s.pop_back();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ParseError, "not a number: '" + cell + "'");
}

}  // namespace

std::string config_hash(const KvConfig& config) { return hex64(fnv1a64(config.dump())); }

RunOutput run_pipeline(const KvConfig& cfg, const RunOptions& options) {
  const auto experiment = cfg.require("experiment");
  Run run{cfg, options, cfg.get_u64("seed", kDefaultSeed), {}, {}, {}, {}};
  if (experiment == "stability") {
    run_stability(run);
  } else if (experiment == "spin") {
    run_spin(run);
  } else if (experiment == "walk") {
    run_walk(run);
  } else if (experiment == "mine") {
    run_mine(run);
  } else if (experiment == "texture") {
    run_texture(run);
  } else {
    bad_key(cfg, "experiment", "expected stability, spin, walk, mine or texture");
  }

  RunOutput out;
  out.config_hash = config_hash(cfg);
  Json config = Json::object();
  for (const auto& [k, v] : cfg.entries()) config[k] = v;
  Json seeds = Json::array();
  for (const auto& s : run.seeds) seeds.push_back({{"seed", s.seed}, {"stream", s.stream}});
  Json keys = Json::array();
  for (const auto& k : run.cache_keys) keys.push_back({{"key", k.hex()}, {"canonical", k.canonical}});
  Json files = Json::array();
  for (const auto& f : run.files) files.push_back(f.first);
  Json report;
  report["provenance"] = {{"tool", "geotax"},   {"version", kVersion}, {"experiment", experiment},
                          {"config", config},   {"config_hash", out.config_hash},
                          {"seeds", seeds},     {"cache_keys", keys}};
  if (experiment == "mine") report["provenance"]["mine_estimator"] = "batch-dv";
  report["results"] = run.results;
  report["files"] = files;

  out.run_dir = options.out_dir / (cfg.get_string("run.name", experiment) + "-" + out.config_hash.substr(0, 8));
  std::filesystem::create_directories(out.run_dir);
  run.files.emplace_back("report.json", report.dump(2) + "\n");
  for (const auto& [name, contents] : run.files) {
    const auto path = out.run_dir / name;
    write_file_atomic(path, contents);
    out.files.push_back(path);
  }
  return out;
}

RunOutput run_pipeline(const std::filesystem::path& config_path, const RunOptions& options) {
  return run_pipeline(KvConfig::load(config_path), options);
}

KvConfig config_from_provenance(std::string_view report_json) {
  const auto doc = Json::parse(report_json, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::ConfigError, "report is not valid JSON");
  if (!doc.contains("provenance") || !doc["provenance"].contains("config"))
    fail(ErrorCode::ConfigError, "report has no provenance config block");
  KvConfig cfg;
  for (const auto& [k, v] : doc["provenance"]["config"].items()) {
    if (!v.is_string()) fail(ErrorCode::ConfigError, "provenance value for '" + k + "' is not a string");
    cfg.set(k, v.get<std::string>());
  }
  return cfg;
}

std::string regime_report(std::string_view fixture_csv) {
  const auto rows = split_csv(fixture_csv);
  require(rows.size() >= 2, ErrorCode::ParseError, "regime fixture has no data rows");
  std::string out = "Model,Ratio,Reduction %,Regime,Consistent\n";
  char buf[256];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    require(r.size() == 4, ErrorCode::ParseError, "regime fixture row " + std::to_string(i) + " needs 4 columns");
    const double ratio = parse_number(r[2]);
    const double reduction = parse_number(r[3]);
    const auto label = procrustes::classify_regime(reduction);
    const bool consistent = std::abs(100.0 * (1.0 - ratio) - reduction) <= 0.15;
    std::snprintf(buf, sizeof buf, ",%.3f,%.1f,%s,%s\n", ratio, reduction, procrustes::to_string(label.label),
                  consistent ? "yes" : "no");
    out += r[1] + buf;
  }
  return out;
}

std::string texture_report(std::string_view fixture_csv) {
  const auto rows = split_csv(fixture_csv);
  require(rows.size() >= 3, ErrorCode::ParseError, "texture fixture needs Real and Random rows");
  std::vector<std::array<double, 2>> v;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    require(rows[i].size() == 3, ErrorCode::ParseError, "texture fixture row " + std::to_string(i) + " needs 3 columns");
    v.push_back({parse_number(rows[i][1]), parse_number(rows[i][2])});
  }
  std::string out = "Condition,RC RDM,RC Composite,Recovery (RDM),Recovery (Composite)\n";
  char buf[160];
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rdm = texture::recovery_fraction(v.front()[0], v[i][0], v.back()[0]);
    const double comp = texture::recovery_fraction(v.front()[1], v[i][1], v.back()[1]);
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f,%.1f%%,%.1f%%\n", v[i][0], v[i][1], 100.0 * rdm, 100.0 * comp);
    out += rows[i + 1][0] + buf;
  }
  return out;
}

}  // namespace geotax::ingest
