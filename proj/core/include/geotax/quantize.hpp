#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::quantize {

enum class Method { Uniform, KMeans };

const char* to_string(Method method);

struct Codebook {
  Matrix centroids;  // K x m
  Method method = Method::KMeans;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // one entry per Lloyd assignment
  std::size_t iterations = 0;

  std::size_t size() const noexcept { return centroids.rows(); }
  std::size_t dim() const noexcept { return centroids.cols(); }
};

struct KMeansOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;  // relative inertia change
};

// k-means++ seeding followed by Lloyd iterations. Empty clusters move to the
// point farthest from its centroid. Throws TooFewPoints when n < K.
Codebook kmeans_fit(const Matrix& data, std::size_t k, const SeedSpec& seed,
                    const KMeansOptions& opt = {});

// Lloyd from `init` (K x m) without reseeding.
Codebook kmeans_from(const Matrix& data, Matrix init, const KMeansOptions& opt = {});

// Fits every K in ascending order. With `nested`, each fit starts from the
// previous centroids plus k-means++ additions, so inertia cannot rise with K.
std::vector<Codebook> kmeans_sweep(const Matrix& data, std::span<const std::size_t> ks,
                                   const SeedSpec& seed, bool nested = true,
                                   const KMeansOptions& opt = {});

// K equal-width cells over [lo, hi] in one dimension, centroids at cell centres.
Codebook uniform_codebook(double lo, double hi, std::size_t k);

// Nearest centroid per row; ties go to the lowest index.
SymbolSequence encode(const Codebook& cb, const Matrix& points);
std::size_t nearest(const Codebook& cb, std::span<const double> point);
// Throws BadSymbol for codes >= K.
Matrix decode(const Codebook& cb, const SymbolSequence& codes);

// Mean squared error per coordinate of decode(encode(data)).
double reconstruction_mse(const Codebook& cb, const Matrix& data);

// Fraction of (point, trial) pairs whose copy perturbed by N(0, sigma^2 I)
// encodes to a different code.
double boundary_crossing_rate(const Codebook& cb, const Matrix& data, double sigma,
                              const SeedSpec& seed, std::size_t trials = 1);

struct InverseLogFit {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of D on 1/ln K. Needs at least three distinct K > 1;
// throws SingularFit otherwise.
InverseLogFit fit_inverse_log(std::span<const double> ks, std::span<const double> d);

// D(R) = sigma^2 2^{-2R/d_M}.
double rd_bound(double variance, double intrinsic_dim, double rate_bits);
// D(K2) / D(K1) under the high-rate law D ~ K^{-2/d_M}.
double high_rate_ratio(double k1, double k2, double intrinsic_dim);

struct RDRow {
  std::size_t k = 0;
  double recon_mse = 0.0;
  double procrustes_d = 0.0;
  double crossing_rate = 0.0;
};

struct RDCurve {
  std::vector<RDRow> rows;
  InverseLogFit fit;
};

struct SweepOptions {
  double noise_sigma = 0.01;  // absolute, in data units
  bool nested = true;
  KMeansOptions kmeans;
};

// VQ double-bind sweep on continuous points: fit a codebook per K, perturb
// the points in input space, re-encode both copies and record the Procrustes
// ratio between the decoded clean and decoded perturbed clouds.
RDCurve vq_sweep(const Matrix& data, std::span<const std::size_t> ks, const SeedSpec& seed,
                 const SweepOptions& opt = {});

}  // namespace geotax::quantize
