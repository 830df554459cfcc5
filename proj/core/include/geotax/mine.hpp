#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/mlp.hpp"
#include "geotax/procrustes.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::mine {

inline const std::vector<std::uint64_t> kMineSeeds = {320, 420, 520, 620, 720};

struct MineConfig {
  MlpConfig net;               // widths[0] is filled in from the data
  double tail_fraction = 0.10;  // estimate = mean bound over this share of final epochs
  std::size_t pca_dim = 50;
};

MineConfig default_mine();
MineConfig sanity_mine();

struct MineRun {
  double estimate = 0.0;
  double initial_bound = 0.0;       // full-data bound before training
  std::vector<double> epoch_bound;  // full-data bound after each tail epoch
  std::vector<double> train_bound;  // mean minibatch bound per epoch
};

// Donsker-Varadhan lower bound E_joint[T] - log E_marginal[e^T] of a network
// on paired rows; marginal pairs use z[perm[i]].
double dv_bound(const Mlp& net, const Matrix& x, const Matrix& z,
                std::span<const std::size_t> perm);

// One training run on inputs that are already standardised. Marginal samples
// come from in-batch permutations of z; dropout is off for the tail passes.
MineRun mine_run(const Matrix& x, const Matrix& z, const MineConfig& cfg, std::uint64_t seed);

// Per-feature z-scoring with population sd; constant features become 0.
Matrix zscore(const Matrix& x);

struct MIEstimate {
  std::vector<double> per_seed;
  double mean = 0.0;
  double std = 0.0;  // population sd over seeds
  double baseline = 0.0;
  double excess = 0.0;  // mean - baseline
  double ceiling = 0.0;
  double normalized = 0.0;  // excess / ceiling when a ceiling is set
};

// z-scores X; reduces Z to min(pca_dim, n, d) principal components and
// z-scores them; runs one estimation per seed.
MIEstimate mine_estimate(const Matrix& x, const Matrix& z, const MineConfig& cfg,
                         std::span<const std::uint64_t> seeds = kMineSeeds);

// MINE(X, N(0, I_d)) with the Gaussian matrix drawn from the data seed.
MIEstimate random_baseline(const Matrix& x, std::size_t dim, const MineConfig& cfg,
                           std::span<const std::uint64_t> seeds = kMineSeeds,
                           std::uint64_t data_seed = kDefaultSeed);

// MINE(X, X + N(0, sigma^2 I)) on the z-scored X.
MIEstimate ceiling_calibration(const Matrix& x, double sigma, const MineConfig& cfg,
                               std::span<const std::uint64_t> seeds = kMineSeeds,
                               std::uint64_t data_seed = kDefaultSeed);

// Fills baseline, excess, ceiling and normalized.
void apply_calibration(MIEstimate& est, double baseline, double ceiling);

// -1/2 ln(1 - rho^2).
double gaussian_mi(double rho);
// max(0.15, 0.3 I).
double sanity_tolerance(double truth);

struct SanityCase {
  double rho = 0.0;
  double truth = 0.0;
  MIEstimate estimate;
  double tolerance = 0.0;
  bool pass = false;        // every seed within tolerance
  bool improved = false;    // trained bound >= bound at initialisation, every seed
};

// x ~ N(0,1), y = rho x + sqrt(1 - rho^2) e.
std::vector<SanityCase> sanity_suite(std::span<const double> rhos, std::size_t n,
                                     const MineConfig& cfg,
                                     std::span<const std::uint64_t> seeds = kMineSeeds,
                                     std::uint64_t data_seed = kDefaultSeed);

// Ground-truth feature vectors.
inline constexpr std::size_t kDnaFeatureCount = 17;
inline constexpr std::size_t kProteinFeatureCount = 25;

// GC content, then the 16 dinucleotide counts (AA, AC, ..., TT) / (L - 1).
std::vector<double> dna_features(const SymbolSequence& seq);
// 20 residue frequencies (ACDEFGHIKLMNPQRSTVWY), L / 1000, net charge per
// residue, mean Kyte-Doolittle hydropathy, 2-way species one-hot.
std::vector<double> protein_features(const SymbolSequence& seq, std::size_t species);

double kyte_doolittle(char residue);

enum class ProbeArch { Linear, TwoLayer, ThreeLayer };

const char* to_string(ProbeArch arch);

struct ProbeOptions {
  double validation_fraction = 0.15;
  std::size_t patience = 20;
  double tol = 1e-4;
  std::size_t max_epochs = 200;
};

// Binary MLP classifier with early stopping on a stratified validation split;
// the weights with the best validation accuracy are kept.
struct ProbeModel {
  Mlp net;
  std::size_t epochs_run = 0;
  double best_validation = 0.0;
};

ProbeModel train_probe(const Matrix& x, std::span<const std::uint32_t> labels, ProbeArch arch,
                       const SeedSpec& seed, const ProbeOptions& opt = {});

// Stratified k-fold accuracy. Linear uses logistic regression (C = 1).
procrustes::CvResult mlp_probe_cv(const Matrix& x, std::span<const std::uint32_t> labels,
                                  ProbeArch arch, std::size_t folds, const SeedSpec& seed,
                                  const ProbeOptions& opt = {});

}  // namespace geotax::mine
