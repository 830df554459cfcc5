#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geotax/cache.hpp"
#include "geotax/dynamics.hpp"
#include "geotax/error.hpp"
#include "geotax/fasta.hpp"
#include "geotax/genome.hpp"
#include "geotax/io.hpp"
#include "geotax/mine.hpp"
#include "geotax/parallel.hpp"
#include "geotax/perturb.hpp"
#include "geotax/pipeline.hpp"
#include "geotax/procrustes.hpp"
#include "geotax/stability.hpp"
#include "geotax/texture.hpp"
#include "geotax/version.hpp"
#include "geotax/walks.hpp"
#include "http_transport.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace geotax;

namespace {

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string config;
  std::string out_dir = ".";
  std::size_t threads = 1;
  std::string cache_dir;
  std::string format = "json";
  bool csv_header = true;
};

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file_atomic(path, text);
  }
}

std::string csv_row(const Globals& g, const std::string& header, const std::string& row) {
  return g.csv_header ? header + "\n" + row + "\n" : row + "\n";
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<SymbolSequence> read_dna_fasta(const std::string& path, std::uint64_t seed) {
  ingest::FetchSpec policy;
  policy.n_policy = ingest::NPolicy::Replace;
  policy.n_seed = seed;
  std::vector<SymbolSequence> out;
  for (const auto& r : ingest::parse_fasta(path)) out.push_back(ingest::apply_n_policy(r.sequence, policy));
  return out;
}

dynamics::Trajectory read_trajectory(const std::string& path) {
  return {read_csv(path), dynamics::kDefaultSpan / dynamics::kDefaultLength, dynamics::System::Waveform};
}

dynamics::GlobalRange parse_range(const std::vector<double>& flat) {
  if (flat.empty() || flat.size() % 2 != 0)
    fail(ErrorCode::ConfigError, "--range expects min,max pairs per channel");
  dynamics::GlobalRange r;
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    r.min.push_back(flat[i]);
    r.max.push_back(flat[i + 1]);
  }
  return r;
}

std::vector<std::uint32_t> read_labels(const EmbeddingMatrix& x, const std::string& path) {
  if (!path.empty()) {
    std::vector<std::uint32_t> out;
    for (double v : read_csv(path).col(0)) out.push_back(static_cast<std::uint32_t>(v));
    require(out.size() == x.n(), ErrorCode::DimensionMismatch, "label count does not match embeddings");
    return out;
  }
  require(x.has_labels(), ErrorCode::ConfigError, "embeddings carry no labels; pass --labels");
  return *x.labels();
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app{"Geometric fidelity audits for embeddings of continuous systems"};
  app.set_version_flag("--version", std::string("geotax ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Root seed")->capture_default_str();
  app.add_option("--config", g.config, "Flat key = value experiment config (report)");
  app.add_option("--out-dir", g.out_dir, "Directory for run outputs")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "Cache directory (GEOTAX_CACHE when unset)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_flag("!--no-csv-header", g.csv_header, "Omit the CSV header line");

  // gen
  std::string gen_system = "lorenz", gen_out;
  std::size_t gen_length = dynamics::kDefaultLength, gen_index = 0, gen_components = 3;
  auto* gen = app.add_subcommand("gen", "Generate a trajectory as CSV (rows are time steps)");
  gen->add_option("--system", gen_system)->check(CLI::IsMember({"lorenz", "oscillator", "waveform"}))->capture_default_str();
  gen->add_option("--length", gen_length)->capture_default_str();
  gen->add_option("--index", gen_index, "Trajectory index within the seed")->capture_default_str();
  gen->add_option("--components", gen_components, "Waveform components")->capture_default_str();
  gen->add_option("-o,--out", gen_out);

  // discretize
  std::string disc_in, disc_out;
  std::vector<double> disc_range;
  std::size_t disc_bins = dynamics::kDefaultBins;
  auto* disc = app.add_subcommand("discretize", "Map a trajectory CSV to bin tokens");
  disc->add_option("-i,--input", disc_in)->required();
  disc->add_option("--bins", disc_bins)->capture_default_str();
  disc->add_option("--range", disc_range, "Global min,max per channel (fitted from the input if omitted)")->delimiter(',');
  disc->add_option("-o,--out", disc_out);

  // perturb
  std::string pert_in, pert_out, pert_kind = "substitute";
  double pert_rate = 0.01, pert_magnitude = 1.0;
  std::vector<double> pert_range;
  auto* pert = app.add_subcommand("perturb", "Perturb FASTA sequences or a trajectory CSV");
  pert->add_option("-i,--input", pert_in)->required();
  pert->add_option("--kind", pert_kind)->capture_default_str();
  pert->add_option("--rate", pert_rate)->capture_default_str();
  pert->add_option("--magnitude", pert_magnitude)->capture_default_str();
  pert->add_option("--range", pert_range, "Global min,max per channel for value noise")->delimiter(',');
  pert->add_option("-o,--out", pert_out);

  // stability
  std::string st_clean, st_pert, st_deltas, st_name = "perturbation", st_variant = "anchor", st_out;
  stability::SplitConfig st_cfg;
  auto* st = app.add_subcommand("stability", "Stability metrics between clean and perturbed embeddings");
  st->add_option("--clean", st_clean)->required();
  st->add_option("--perturbed", st_pert)->required();
  st->add_option("--deltas", st_deltas, "CSV column of input-space perturbation magnitudes");
  st->add_option("--name", st_name)->capture_default_str();
  st->add_option("--splits", st_cfg.n_splits)->capture_default_str();
  st->add_option("--bootstrap", st_cfg.n_bootstrap)->capture_default_str();
  st->add_option("--max-samples", st_cfg.max_samples)->capture_default_str();
  st->add_option("--anchors", st_cfg.anchor_count, "0 picks min(50, n/10)")->capture_default_str();
  st->add_flag("--rank-normalize", st_cfg.rank_normalize_anchors);
  st->add_option("--variant", st_variant)->check(CLI::IsMember({"anchor", "perturbation"}))->capture_default_str();
  st->add_option("-o,--out", st_out);

  // procrustes
  std::string pr_clean, pr_pert, pr_name = "perturbation", pr_out;
  auto* pr = app.add_subcommand("procrustes", "Procrustes spin test and regime label");
  pr->add_option("--clean", pr_clean)->required();
  pr->add_option("--perturbed", pr_pert)->required();
  pr->add_option("--name", pr_name)->capture_default_str();
  pr->add_option("-o,--out", pr_out);

  // walk
  std::string wk_kind = "mutation", wk_fasta, wk_a, wk_b, wk_out;
  std::size_t wk_n = 100, wk_steps = 101, wk_bins = dynamics::kDefaultBins;
  std::vector<std::size_t> wk_core;
  std::optional<std::size_t> wk_landmark_pos;
  std::string wk_landmark_base = "A";
  auto* wk = app.add_subcommand("walk", "Build a mutation or interpolation walk");
  wk->add_option("--kind", wk_kind)->check(CLI::IsMember({"mutation", "interpolation"}))->capture_default_str();
  wk->add_option("--fasta", wk_fasta, "Wildtype FASTA (mutation)");
  wk->add_option("--mutations", wk_n)->capture_default_str();
  wk->add_option("--core", wk_core, "start,end of the mutable core")->delimiter(',')->expected(2);
  wk->add_option("--landmark-pos", wk_landmark_pos);
  wk->add_option("--landmark-base", wk_landmark_base)->capture_default_str();
  wk->add_option("--a", wk_a, "Endpoint trajectory CSV (interpolation)");
  wk->add_option("--b", wk_b, "Endpoint trajectory CSV (interpolation)");
  wk->add_option("--steps", wk_steps)->capture_default_str();
  wk->add_option("--bins", wk_bins)->capture_default_str();
  wk->add_option("-o,--out", wk_out, "FASTA (mutation) or token CSV (interpolation)");

  // lipschitz
  std::string lp_emb, lp_metric = "l2", lp_svg, lp_out;
  auto* lp = app.add_subcommand("lipschitz", "Lipschitz profile of consecutive walk embeddings");
  lp->add_option("-e,--embeddings", lp_emb)->required();
  lp->add_option("--metric", lp_metric)->check(CLI::IsMember({"l2", "cosine"}))->capture_default_str();
  lp->add_option("--svg", lp_svg, "Write a PCA trajectory plot");
  lp->add_option("-o,--out", lp_out, "Profile CSV (step,L)");

  // mine
  std::string mi_x, mi_z, mi_out;
  bool mi_sanity = false;
  std::vector<double> mi_rhos = {0.0, 0.3, 0.6, 0.9};
  std::vector<std::uint64_t> mi_seeds(mine::kMineSeeds.begin(), mine::kMineSeeds.end());
  std::size_t mi_n = 2000, mi_epochs = 0, mi_pca = 50;
  double mi_sigma = 0.0;
  bool mi_baseline = true;
  auto* mi = app.add_subcommand("mine", "MINE mutual information estimate or Gaussian sanity suite");
  mi->add_option("--x", mi_x, "Embeddings");
  mi->add_option("--z", mi_z, "Ground-truth features");
  mi->add_flag("--sanity", mi_sanity);
  mi->add_option("--rhos", mi_rhos)->delimiter(',');
  mi->add_option("--n", mi_n)->capture_default_str();
  mi->add_option("--seeds", mi_seeds)->delimiter(',');
  mi->add_option("--epochs", mi_epochs, "0 keeps the default");
  mi->add_option("--pca-dim", mi_pca)->capture_default_str();
  mi->add_option("--ceiling-sigma", mi_sigma, "0 skips the ceiling");
  mi->add_flag("!--no-baseline", mi_baseline);
  mi->add_option("-o,--out", mi_out);

  // texture
  std::string tx_fasta, tx_out;
  std::size_t tx_count = 200, tx_length = 1000;
  std::vector<std::size_t> tx_k = {1, 2, 3};
  stability::SplitConfig tx_cfg;
  auto* tx = app.add_subcommand("texture", "Four-condition reverse-complement texture test");
  tx->add_option("--fasta", tx_fasta, "Real corpus (synthetic desk corpus if omitted)");
  tx->add_option("--count", tx_count)->capture_default_str();
  tx->add_option("--length", tx_length)->capture_default_str();
  tx->add_option("--k", tx_k)->delimiter(',');
  tx->add_option("--bootstrap", tx_cfg.n_bootstrap)->capture_default_str();
  tx->add_option("--splits", tx_cfg.n_splits)->capture_default_str();
  tx->add_option("-o,--out", tx_out);

  // probe
  std::string pb_emb, pb_labels, pb_arch = "linear", pb_out;
  std::size_t pb_folds = 5;
  auto* pb = app.add_subcommand("probe", "Stratified k-fold linear or MLP probe accuracy");
  pb->add_option("-e,--embeddings", pb_emb)->required();
  pb->add_option("--labels", pb_labels, "CSV column of class labels (else EMB1 labels)");
  pb->add_option("--arch", pb_arch)->check(CLI::IsMember({"linear", "two-layer", "three-layer"}))->capture_default_str();
  pb->add_option("--folds", pb_folds)->capture_default_str();
  pb->add_option("-o,--out", pb_out);

  // fetch
  ingest::FetchSpec fe_spec;
  fe_spec.end = 0;
  std::string fe_policy = "reject", fe_out, fe_source = "genome-rest";
  auto* fe = app.add_subcommand("fetch", "Fetch a genomic span as FASTA (cached)");
  fe->add_option("--source", fe_source)->check(CLI::IsMember({"genome-rest", "synthetic"}))->capture_default_str();
  fe->add_option("--assembly", fe_spec.assembly)->capture_default_str();
  fe->add_option("--chrom", fe_spec.chromosome)->capture_default_str();
  fe->add_option("--start", fe_spec.start)->required();
  fe->add_option("--end", fe_spec.end)->required();
  fe->add_option("--n-policy", fe_policy)->check(CLI::IsMember({"reject", "replace"}))->capture_default_str();
  fe->add_option("--max-n", fe_spec.max_n_fraction)->capture_default_str();
  fe->add_flag("--fallback", fe_spec.synthetic_fallback, "Use a seeded synthetic sequence when offline");
  fe->add_option("-o,--out", fe_out);

  // report
  std::string rp_rerun, rp_regimes, rp_texture, rp_out;
  bool rp_offline = false;
  auto* rp = app.add_subcommand("report", "Run a configured experiment or regenerate report tables");
  rp->add_option("--rerun", rp_rerun, "Re-execute from the provenance block of a report.json");
  rp->add_option("--regimes", rp_regimes, "Procrustes ratio fixture CSV");
  rp->add_option("--texture-table", rp_texture, "Texture condition fixture CSV");
  rp->add_flag("--offline", rp_offline, "Never touch the network");
  rp->add_option("-o,--out", rp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_thread_count(g.threads);
    const bool csv = g.format == "csv";

    if (*gen) {
      const Rng root(g.seed, "cli/gen");
      dynamics::Trajectory t;
      if (gen_system == "lorenz") {
        t = dynamics::gen_lorenz({root.split(gen_index).key(), "lorenz"}, gen_length);
      } else if (gen_system == "oscillator") {
        Rng rng = root.split(gen_index);
        t = dynamics::gen_oscillator(dynamics::sample_oscillator(rng), gen_length);
      } else {
        t = dynamics::gen_waveform({root.split(gen_index).key(), "waveform"}, gen_components, gen_length);
      }
      if (gen_out.empty()) {
        for (std::size_t r = 0; r < t.values.rows(); ++r) {
          for (std::size_t c = 0; c < t.values.cols(); ++c)
            std::printf("%s%.17g", c ? "," : "", t.values(r, c));
          std::printf("\n");
        }
      } else {
        write_csv(gen_out, t.values);
      }
    } else if (*disc) {
      const auto t = read_trajectory(disc_in);
      const auto range = disc_range.empty() ? dynamics::fit_global_range({&t, 1}) : parse_range(disc_range);
      emit(disc_out, dynamics::discretize(t, range, disc_bins).to_string() + "\n");
    } else if (*pert) {
      perturb::PerturbationSpec spec{perturb::kind_from_string(pert_kind), pert_rate, pert_magnitude,
                                     {g.seed, "cli/perturb"}};
      if (spec.kind == perturb::Kind::ValueNoise || (spec.kind == perturb::Kind::TimeReverse && pert_in.ends_with(".csv"))) {
        const auto t = read_trajectory(pert_in);
        dynamics::Trajectory out;
        if (spec.kind == perturb::Kind::TimeReverse) {
          out = perturb::time_reverse(t);
        } else {
          const auto range = pert_range.empty() ? dynamics::fit_global_range({&t, 1}) : parse_range(pert_range);
          out = perturb::value_noise(t, range, spec);
        }
        if (pert_out.empty()) pert_out = "-";
        if (pert_out == "-") {
          for (std::size_t r = 0; r < out.values.rows(); ++r) {
            for (std::size_t c = 0; c < out.values.cols(); ++c) std::printf("%s%.17g", c ? "," : "", out.values(r, c));
            std::printf("\n");
          }
        } else {
          write_csv(pert_out, out.values);
        }
      } else {
        auto records = ingest::parse_fasta(pert_in);
        const auto seqs = read_dna_fasta(pert_in, g.seed);
        for (std::size_t i = 0; i < records.size(); ++i) {
          auto s = spec;
          s.seed = {Rng(spec.seed).split(i).key(), "record"};
          SymbolSequence out;
          switch (spec.kind) {
            case perturb::Kind::Substitute: out = perturb::substitute(seqs[i], s); break;
            case perturb::Kind::ReverseComplement: out = perturb::reverse_complement(seqs[i]); break;
            case perturb::Kind::Reverse:
            case perturb::Kind::TimeReverse: out = perturb::time_reverse(seqs[i]); break;
            default: fail(ErrorCode::ConfigError, "kind '" + pert_kind + "' does not apply to sequences");
          }
          records[i].sequence = out.to_string();
        }
        emit(pert_out, ingest::format_fasta(records, 80));
      }
    } else if (*st) {
      st_cfg.variant = st_variant == "perturbation" ? stability::CompositeVariant::Perturbation
                                                 : stability::CompositeVariant::Anchor;
      st_cfg.validate();
      std::vector<double> deltas;
      if (!st_deltas.empty()) deltas = read_csv(st_deltas).col(0);
      const auto rep = stability::evaluate(read_embeddings(st_clean), read_embeddings(st_pert), deltas, st_cfg,
                                           {g.seed, "cli/stability"}, st_name);
      std::string text = csv ? stability::to_csv({&rep, 1}) : stability::to_ndjson({&rep, 1});
      if (csv && !g.csv_header) text = text.substr(text.find('\n') + 1);
      emit(st_out, text);
    } else if (*pr) {
      const auto r = procrustes::procrustes_align(read_embeddings(pr_clean).values(), read_embeddings(pr_pert).values());
      const auto label = procrustes::classify_regime(r);
      if (csv) {
        emit(pr_out, csv_row(g, "Perturbation,Raw Error,Aligned Error,Ratio,Reduction %,Regime",
                             pr_name + "," + fmt("%.6f", r.raw_error) + "," + fmt("%.6f", r.aligned_error) + "," +
                                 fmt("%.6f", r.ratio) + "," + fmt("%.2f", label.rho_percent) + "," +
                                 procrustes::to_string(label.label)));
      } else {
        Json j = {{"perturbation", pr_name}, {"raw_error", r.raw_error}, {"aligned_error", r.aligned_error},
                  {"ratio", r.ratio}, {"reduction_percent", label.rho_percent}, {"scale", r.scale},
                  {"regime", procrustes::to_string(label.label)}};
        emit(pr_out, j.dump(2) + "\n");
      }
    } else if (*wk) {
      if (wk_kind == "mutation") {
        require(!wk_fasta.empty(), ErrorCode::ConfigError, "--fasta is required for mutation walks");
        const auto wt = read_dna_fasta(wk_fasta, g.seed).at(0);
        walks::CoreRegion core{wt.size() / 4, 3 * wt.size() / 4};
        if (wk_core.size() == 2) core = {wk_core[0], wk_core[1]};
        std::optional<walks::Landmark> landmark;
        if (wk_landmark_pos) landmark = walks::Landmark{*wk_landmark_pos, wk_landmark_base.at(0)};
        const auto walk = walks::build_mutation_walk(wt, wk_n, core, {g.seed, "cli/walk"}, landmark);
        emit(wk_out, ingest::format_fasta(walks::to_fasta(walk), 80));
      } else {
        require(!wk_a.empty() && !wk_b.empty(), ErrorCode::ConfigError, "--a and --b are required for interpolation");
        const std::vector<dynamics::Trajectory> ends = {read_trajectory(wk_a), read_trajectory(wk_b)};
        const auto walk = walks::build_interpolation_walk(ends[0], ends[1], dynamics::fit_global_range(ends),
                                                          wk_steps, wk_bins);
        std::string out;
        for (const auto& step : walk.steps) {
          for (std::size_t i = 0; i < step.size(); ++i) out += (i ? "," : "") + std::to_string(step.symbols[i]);
          out += "\n";
        }
        emit(wk_out, out);
      }
    } else if (*lp) {
      const Matrix emb = read_embeddings(lp_emb).values();
      const auto profile = lp_metric == "l2" ? walks::lipschitz_l2(emb) : walks::lipschitz_cosine(emb);
      if (!lp_out.empty()) emit(lp_out, walks::profile_csv(profile));
      if (!lp_svg.empty()) {
        const std::size_t k = std::min<std::size_t>(3, std::min(emb.rows(), emb.cols()));
        emit(lp_svg, walks::svg_polyline(walks::pca_trajectory(emb, k).scores, 480, 480, "walk"));
      }
      if (csv) {
        std::printf("%s", csv_row(g, "mean,max,smoothness_ratio,spike_threshold,spikes",
                                  fmt("%.6g", profile.mean) + "," + fmt("%.6g", profile.max) + "," +
                                      fmt("%.6g", profile.smoothness_ratio) + "," +
                                      fmt("%.6g", profile.spike_threshold) + "," +
                                      std::to_string(profile.spikes.size())).c_str());
      } else {
        Json j = {{"metric", lp_metric}, {"mean", profile.mean}, {"max", profile.max},
                  {"smoothness_ratio", profile.smoothness_ratio}, {"spike_threshold", profile.spike_threshold},
                  {"spikes", profile.spikes}};
        std::printf("%s\n", j.dump(2).c_str());
      }
    } else if (*mi) {
      if (mi_sanity) {
        auto cfg = mine::sanity_mine();
        if (mi_epochs) cfg.net.epochs = mi_epochs;
        const auto cases = mine::sanity_suite(mi_rhos, mi_n, cfg, mi_seeds, g.seed);
        std::string text = csv && g.csv_header ? "rho,truth,estimate,tolerance,pass\n" : "";
        Json arr = Json::array();
        for (const auto& c : cases) {
          text += fmt("%.2f", c.rho) + "," + fmt("%.4f", c.truth) + "," + fmt("%.4f", c.estimate.mean) + "," +
                  fmt("%.4f", c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
          arr.push_back({{"rho", c.rho}, {"truth", c.truth}, {"per_seed", c.estimate.per_seed},
                         {"mean", c.estimate.mean}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        }
        emit(mi_out, csv ? text : arr.dump(2) + "\n");
      } else {
        require(!mi_x.empty() && !mi_z.empty(), ErrorCode::ConfigError, "--x and --z are required without --sanity");
        const Matrix x = read_embeddings(mi_x).values();
        const Matrix z = read_embeddings(mi_z).values();
        auto cfg = mine::default_mine();
        if (mi_epochs) cfg.net.epochs = mi_epochs;
        cfg.pca_dim = mi_pca;
        auto est = mine::mine_estimate(x, z, cfg, mi_seeds);
        const double base = mi_baseline ? mine::random_baseline(x, z.cols(), cfg, mi_seeds, g.seed).mean : 0.0;
        const double ceil = mi_sigma > 0 ? mine::ceiling_calibration(x, mi_sigma, cfg, mi_seeds, g.seed).mean : 0.0;
        mine::apply_calibration(est, base, ceil);
        if (csv) {
          emit(mi_out, csv_row(g, "mean,std,baseline,excess,ceiling,normalized",
                               fmt("%.4f", est.mean) + "," + fmt("%.4f", est.std) + "," + fmt("%.4f", est.baseline) +
                                   "," + fmt("%.4f", est.excess) + "," + fmt("%.4f", est.ceiling) + "," +
                                   fmt("%.4f", est.normalized)));
        } else {
          Json j = {{"per_seed", est.per_seed}, {"mean", est.mean},     {"std", est.std},
                    {"baseline", est.baseline}, {"excess", est.excess}, {"ceiling", est.ceiling},
                    {"normalized", est.normalized}};
          emit(mi_out, j.dump(2) + "\n");
        }
      }
    } else if (*tx) {
      const auto corpus = tx_fasta.empty() ? texture::synthetic_corpus(tx_count, tx_length, {g.seed, "cli/texture/corpus"})
                                           : read_dna_fasta(tx_fasta, g.seed);
      const auto rows = texture::texture_experiment(corpus, texture::projected_kmer_embedder(tx_k), tx_cfg, {g.seed, "cli/texture"});
      if (csv) {
        std::string text = texture::texture_table_csv(rows);
        if (!g.csv_header) text = text.substr(text.find('\n') + 1);
        emit(tx_out, text);
      } else {
        Json arr = Json::array();
        for (const auto& r : rows)
          arr.push_back({{"condition", r.condition}, {"rc_rdm", r.rc_rdm}, {"rc_composite", r.rc_composite},
                         {"recovery", r.recovery}});
        emit(tx_out, arr.dump(2) + "\n");
      }
    } else if (*pb) {
      const auto x = read_embeddings(pb_emb);
      const auto labels = read_labels(x, pb_labels);
      const auto arch = pb_arch == "linear" ? mine::ProbeArch::Linear
                        : pb_arch == "two-layer" ? mine::ProbeArch::TwoLayer
                                                 : mine::ProbeArch::ThreeLayer;
      const auto cv = mine::mlp_probe_cv(x.values(), labels, arch, pb_folds, {g.seed, "cli/probe"});
      if (csv) {
        emit(pb_out, csv_row(g, "arch,folds,mean,std", pb_arch + "," + std::to_string(pb_folds) + "," +
                                                           fmt("%.4f", cv.mean) + "," + fmt("%.4f", cv.std)));
      } else {
        Json j = {{"arch", pb_arch}, {"folds", pb_folds}, {"mean", cv.mean}, {"std", cv.std},
                  {"fold_accuracy", cv.fold_accuracy}};
        emit(pb_out, j.dump(2) + "\n");
      }
    } else if (*fe) {
      fe_spec.source = ingest::source_from_string(fe_source);
      fe_spec.n_policy = fe_policy == "replace" ? ingest::NPolicy::Replace : ingest::NPolicy::Reject;
      fe_spec.n_seed = g.seed;
      fe_spec.synthetic_seed = g.seed;
      const ingest::Cache cache(ingest::resolve_cache_dir(g.cache_dir));
      tools::HttpTransport transport;
      ingest::GenomeClient client(&transport, &cache);
      const auto res = client.fetch(fe_spec);
      const std::string header = fe_spec.assembly + ":" + fe_spec.chromosome + ":" + std::to_string(fe_spec.start) +
                                 "-" + std::to_string(fe_spec.end) + (res.synthetic ? " synthetic" : "");
      emit(fe_out, ingest::format_fasta({{header, res.sequence.to_string()}}, 80));
      std::fprintf(stderr, "%s ambiguous=%zu cache=%s\n", header.c_str(), res.ambiguous,
                   res.from_cache ? "hit" : "miss");
    } else if (*rp) {
      if (!rp_regimes.empty()) {
        emit(rp_out, ingest::regime_report(read_file(rp_regimes)));
      } else if (!rp_texture.empty()) {
        emit(rp_out, ingest::texture_report(read_file(rp_texture)));
      } else {
        KvConfig cfg;
        if (!rp_rerun.empty()) {
          cfg = ingest::config_from_provenance(read_file(rp_rerun));
        } else {
          require(!g.config.empty(), ErrorCode::ConfigError, "report needs --config, --rerun, --regimes or --texture-table");
          cfg = KvConfig::load(g.config);
        }
        tools::HttpTransport transport;
        ingest::RunOptions opt{g.out_dir, g.cache_dir, rp_offline ? nullptr : &transport};
        const auto out = ingest::run_pipeline(cfg, opt);
        std::printf("%s\n", out.run_dir.string().c_str());
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "geotax: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "geotax: %s\n", e.what());
    return 3;
  }
  return 0;
}
