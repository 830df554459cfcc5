#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"

namespace geotax::procrustes {

struct ProcrustesResult {
  double raw_error = 0.0;      // |X_c - X_p|_F / sqrt(n), both mean-centred
  double aligned_error = 0.0;  // |X_c - s X_p R|_F / sqrt(n)
  double ratio = 0.0;          // aligned / raw
  double reduction = 0.0;      // 1 - ratio
  Matrix rotation;             // d x d orthogonal, reflections allowed
  double scale = 1.0;
  bool exact_match = false;    // raw error below 1e-12 of the input scale; ratio is reported as 0
};

// Centre both inputs, find R on the Frobenius-normalised matrices from the
// SVD U S V^T = X_p^T X_c as R = U V^T, then fit the isotropic scale
// s = tr(X_c^T X_p R) / tr((X_p R)^T X_p R) on the centred data.
// Throws DegenerateInput when a centred input is all zero.
ProcrustesResult procrustes_align(const Matrix& clean, const Matrix& pert);

enum class Regime { BrittleGlass, TransitionZone, UntetheredGel };

const char* to_string(Regime regime);

struct RegimeLabel {
  Regime label = Regime::TransitionZone;
  double rho_percent = 0.0;
};

inline constexpr double kBrittleBelowPercent = 2.0;
inline constexpr double kGelAbovePercent = 4.0;

RegimeLabel classify_regime(double rho_percent);
RegimeLabel classify_regime(const ProcrustesResult& result);

struct HeadAgreement {
  double agreement = 0.0;  // fraction of rows whose top-1 token matches
  double mean_kl = 0.0;    // mean KL(p_clean || p_pert) in nats
};

// Rows are positions, columns vocabulary logits. Top-1 ties go to the
// lowest index.
HeadAgreement frozen_head_agreement(const Matrix& logits_clean, const Matrix& logits_pert);

struct LogisticOptions {
  double C = 1.0;
  std::size_t max_iter = 1000;
  double tol = 1e-8;  // on the gradient 2-norm
};

// Binary L2-regularised logistic regression minimising
// C * sum(log loss) + |w|^2 / 2 with an unpenalised intercept, fitted by
// damped Newton steps with backtracking.
struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  double decision(std::span<const double> x) const;
  double probability(std::span<const double> x) const;
  std::uint32_t predict(std::span<const double> x) const;
};

LogisticModel fit_logistic(const Matrix& x, std::span<const std::uint32_t> y,
                           const LogisticOptions& opt = {});

// Per class, indices are shuffled and dealt round-robin into k folds.
// Returns the test indices of each fold in ascending order.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint32_t> labels,
                                                       std::size_t k, const SeedSpec& seed);

struct CvResult {
  double mean = 0.0;
  double std = 0.0;  // population std over folds
  std::vector<double> fold_accuracy;
};

// Labels must be 0/1 with both classes present at least `folds` times.
// Throws SingleClass otherwise.
void check_binary_labels(std::span<const std::uint32_t> labels, std::size_t folds);

CvResult frozen_head_classifier(const Matrix& x, std::span<const std::uint32_t> labels,
                                std::size_t folds, const SeedSpec& seed,
                                const LogisticOptions& opt = {});

}  // namespace geotax::procrustes
