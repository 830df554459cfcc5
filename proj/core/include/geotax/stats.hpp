#pragma once

#include <span>
#include <vector>

namespace geotax {

// Result of a rank correlation. A constant input has no defined correlation;
// value is then 0 and degenerate is set so batch pipelines keep running.
struct Correlation {
  double value = 0.0;
  bool degenerate = false;
};

// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

double mean(std::span<const double> values);
double population_std(std::span<const double> values);
double sample_std(std::span<const double> values);

Correlation pearson(std::span<const double> a, std::span<const double> b);

// Spearman's rho: Pearson correlation of average-tie ranks. Requires equal
// lengths >= 3.
Correlation spearman(std::span<const double> a, std::span<const double> b);

}  // namespace geotax
