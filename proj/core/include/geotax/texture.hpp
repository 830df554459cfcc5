#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"
#include "geotax/stability.hpp"

namespace geotax::texture {

// Counts indexed by lexicographic k-mer rank over A<C<G<T.
struct KmerHistogram {
  std::size_t k = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::vector<double> frequencies() const;
  bool operator==(const KmerHistogram&) const = default;
};

// Throws BadBase for non-DNA input and TooShort when L < k.
KmerHistogram kmer_histogram(const SymbolSequence& seq, std::size_t k);

// perm[r] is the rank of the reverse complement of the k-mer with rank r.
std::vector<std::size_t> complement_permutation(std::size_t k);

// Altschul-Erickson shuffle: a uniformly drawn Eulerian path through the
// dinucleotide multigraph, so every dinucleotide count and the first and last
// bases are preserved.
SymbolSequence dinucleotide_shuffle(const SymbolSequence& seq, const SeedSpec& seed);

struct MarkovModel {
  std::array<double, 4> initial{};
  std::array<std::array<double, 4>, 4> transition{};
  std::array<bool, 4> fallback{};  // row had no observations and is uniform
};

// Pooled over the corpus: transition(b -> c) = count(bc) / count(b.), initial
// = marginal base frequency.
MarkovModel fit_markov(std::span<const SymbolSequence> corpus);
SymbolSequence gen_markov(const MarkovModel& model, std::size_t length, const SeedSpec& seed);

// Cosine between the k-mer histograms of seq and its reverse complement.
double rc_kmer_cosine(const SymbolSequence& seq, std::size_t k);

// (condition - random) / (real - random). Throws DegenerateGap when real == random.
double recovery_fraction(double real, double condition, double random);

// Heterogeneous desk corpus: each sequence follows its own randomly drawn
// first-order chain, so per-sequence composition varies. The chain emits
// 50-base segments, each placed on a random strand.
std::vector<SymbolSequence> synthetic_corpus(std::size_t count, std::size_t length,
                                             const SeedSpec& seed);

std::vector<SymbolSequence> uniform_corpus(std::size_t count, std::size_t length,
                                           const SeedSpec& seed);

using Embedder = std::function<Matrix(std::span<const SymbolSequence>)>;

// Concatenated k-mer frequency vectors for each k in ks. Reverse complement
// permutes these coordinates identically for every row, so RDMs built from
// them are exactly RC-invariant.
Embedder kmer_embedder(std::vector<std::size_t> ks = {2, 3});

// Histogram encoder without RC symmetry: centred k-mer frequencies (minus
// 4^-k) through a fixed Gaussian projection to `dim` columns.
Embedder projected_kmer_embedder(std::vector<std::size_t> ks = {1, 2, 3}, std::size_t dim = 16,
                                 const SeedSpec& seed = {kDefaultSeed, "texture/projection"});

struct ConditionRow {
  std::string condition;
  double rc_rdm = 0.0;        // RDM similarity between forward and RC embeddings
  double rc_composite = 0.0;  // stability composite with RC as the perturbation
  double recovery = 0.0;      // on rc_rdm
};

// Real, Shuffled (dinucleotide-preserving), Markov (pooled first-order chain)
// and Random (uniform bases) corpora of the same size and lengths.
std::vector<ConditionRow> texture_experiment(std::span<const SymbolSequence> real,
                                             const Embedder& embed,
                                             const stability::SplitConfig& cfg,
                                             const SeedSpec& seed);

// `Condition,RC RDM,RC Composite,Recovery`
std::string texture_table_csv(std::span<const ConditionRow> rows);

}  // namespace geotax::texture
