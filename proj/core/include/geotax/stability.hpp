#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"
#include "geotax/stats.hpp"

namespace geotax::stability {

// Which four metrics enter the composite. Anchor: sample split, feature
// split, RDM similarity, anchor stability. Perturbation swaps anchor stability
// for perturbation stability.
enum class CompositeVariant { Anchor, Perturbation };

const char* to_string(CompositeVariant v);

struct SplitConfig {
  std::size_t n_splits = 30;
  std::size_t max_samples = 2500;
  std::size_t n_bootstrap = 5;
  std::size_t anchor_count = 0;  // 0 selects min(50, n / 10), at least 1
  bool rank_normalize_anchors = false;
  CompositeVariant variant = CompositeVariant::Anchor;

  void validate() const;
};

std::size_t default_anchor_count(std::size_t n);

struct SplitScore {
  double value = 0.0;  // mean over splits
  std::size_t degenerate_splits = 0;
  std::vector<double> per_split;
};

// Spearman between the cosine RDMs of the clean and perturbed rows.
Correlation rdm_similarity(const Matrix& clean, const Matrix& pert);

// Two disjoint random halves of floor(n/2) samples per split, each half's
// RDM over its own samples, Spearman between the two condensed vectors.
SplitScore sample_split(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed);
Correlation sample_split_halves(const Matrix& x, std::span<const std::size_t> first,
                                std::span<const std::size_t> second);

// Two disjoint random halves of floor(d/2) features per split; full-sample
// RDMs on each half.
SplitScore feature_split(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed);
Correlation feature_split_halves(const Matrix& x, std::span<const std::size_t> first,
                                 std::span<const std::size_t> second);

// m anchors drawn once; the remaining samples are split into two disjoint
// halves per split and the anchor-to-half distance blocks are compared.
SplitScore anchor_stability(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed);
Correlation anchor_stability_halves(const Matrix& x, std::span<const std::size_t> anchors,
                                    std::span<const std::size_t> first,
                                    std::span<const std::size_t> second, bool rank_normalize);

// Spearman(input_deltas, row-wise |x_clean - x_pert|_2).
Correlation perturbation_stability(std::span<const double> input_deltas, const Matrix& clean,
                                   const Matrix& pert);

// Mean row-wise |x_clean - x_pert|_2.
double perturbation_magnitude(const Matrix& clean, const Matrix& pert);

// Stratified by label when present: proportional allocation with
// largest-remainder rounding. Returns ascending indices; the identity when
// n <= max_samples.
std::vector<std::size_t> subsample_indices(std::size_t n,
                                           const std::vector<std::uint32_t>* labels,
                                           std::size_t max_samples, const SeedSpec& seed);

// n draws with replacement, stratified by label when present.
std::vector<std::size_t> bootstrap_indices(std::size_t n,
                                           const std::vector<std::uint32_t>* labels,
                                           const SeedSpec& seed);

struct Metrics {
  double rdm_similarity = 0.0;
  double sample_split = 0.0;
  double feature_split = 0.0;
  double anchor_stability = 0.0;
  double perturbation_stability = 0.0;
  double perturbation_magnitude = 0.0;
  double composite = 0.0;
};

double composite(const Metrics& m, CompositeVariant variant);

struct Provenance {
  std::uint64_t seed = kDefaultSeed;
  std::string stream;
  std::size_t n_input = 0;
  std::size_t subsample_size = 0;
  std::size_t n_splits = 0;
  std::size_t n_bootstrap = 0;
  std::size_t anchor_count = 0;
  bool rank_normalize_anchors = false;
  CompositeVariant variant = CompositeVariant::Anchor;
  std::size_t degenerate_correlations = 0;
};

struct StabilityReport {
  std::string perturbation;
  Metrics mean;  // bootstrap means; these are the reported values
  Metrics std;   // population std over replicates
  std::vector<Metrics> replicates;
  Provenance provenance;
};

// Subsample, then for each bootstrap replicate resample rows and compute
// every metric. Split metrics are measured on the perturbed embeddings.
// input_deltas may be empty, in which case perturbation stability is
// reported as degenerate (0).
StabilityReport evaluate(const EmbeddingMatrix& clean, const EmbeddingMatrix& pert,
                         std::span<const double> input_deltas, const SplitConfig& cfg,
                         const SeedSpec& seed, const std::string& perturbation = "perturbation");

// One JSON object per line.
std::string to_ndjson(std::span<const StabilityReport> reports);
// `Perturbation,RDM Sim.,Pert. Stab.,Pert. Mag.,Composite`
std::string to_csv(std::span<const StabilityReport> reports);

}  // namespace geotax::stability
