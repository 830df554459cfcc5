#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geotax/dynamics.hpp"
#include "geotax/fasta.hpp"
#include "geotax/matrix.hpp"
#include "geotax/pca.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::walks {

struct Walk {
  std::vector<SymbolSequence> steps;
  std::vector<double> alpha;                              // interpolation walks
  std::vector<std::optional<std::size_t>> changed_position;  // mutation walks, per step
  std::optional<std::size_t> landmark_index;              // step that applied the landmark
};

// steps[i] = discretize((1 - a_i) A + a_i B, range) with a_i = i / (n_steps - 1).
Walk build_interpolation_walk(const dynamics::Trajectory& a, const dynamics::Trajectory& b,
                              const dynamics::GlobalRange& range, std::size_t n_steps = 101,
                              std::size_t n_bins = dynamics::kDefaultBins);

struct Landmark {
  std::size_t position = 0;
  char base = 'A';
};

// Half-open [start, end) window of the wildtype that may be mutated.
struct CoreRegion {
  std::size_t start = 0;
  std::size_t end = 0;
};

// n_mutations positions drawn without replacement from the core (excluding
// the landmark position), each changed to a uniformly drawn non-reference
// base; together with the landmark they are applied one per step in a
// seed-shuffled order. Throws RegionTooSmall.
Walk build_mutation_walk(const SymbolSequence& wildtype, std::size_t n_mutations, CoreRegion core,
                         const SeedSpec& seed, std::optional<Landmark> landmark = std::nullopt);

// One record per step; header `step=<i> pos=<p>` (pos=- for step 0).
std::vector<ingest::FastaRecord> to_fasta(const Walk& walk);

struct LipschitzProfile {
  std::vector<double> values;  // one per consecutive step pair
  double mean = 0.0;
  double max = 0.0;
  double smoothness_ratio = 1.0;  // mean / max; 1 for an all-zero profile
  double spike_threshold = 0.0;   // mean + 2 population sd
  std::vector<std::size_t> spikes;
  std::vector<double> distance_from_start;  // cosine profiles only
};

LipschitzProfile lipschitz_l2(const Matrix& embeddings);
// Throws ZeroNormRow.
LipschitzProfile lipschitz_cosine(const Matrix& embeddings);

// Indices strictly above mean + 2 * population sd. Throws TooShort for fewer
// than three values.
std::vector<std::size_t> detect_spikes(std::span<const double> values, double* threshold = nullptr);

// Mean of per-pair mean Lipschitz values.
double mean_of_pair_means(std::span<const LipschitzProfile> pairs);

// max / min over a set of model mean Lipschitz values.
double gap_statistic(std::span<const double> mean_lipschitz);

PcaResult pca_trajectory(const Matrix& embeddings, std::size_t k = 3);

// Polyline through the first two columns of a path, fitted to a width x
// height canvas. Byte-identical for identical input.
std::string svg_polyline(const Matrix& path, int width = 480, int height = 480,
                         const std::string& title = "");

// `step,L` rows.
std::string profile_csv(const LipschitzProfile& profile);

}  // namespace geotax::walks
