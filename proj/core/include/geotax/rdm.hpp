#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geotax/matrix.hpp"

namespace geotax {

// Symmetric pairwise distances with zero diagonal, stored as the condensed
// upper triangle in row order: (0,1), (0,2), ..., (1,2), ...
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<double> condensed);

  std::size_t n() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const;
  std::span<const double> condensed() const noexcept { return condensed_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> condensed_;
};

inline constexpr double kZeroNormThreshold = 1e-300;

// entry(i,j) = 1 - <x_i,x_j> / (|x_i| |x_j|), clamped to [0, 2].
DistanceMatrix cosine_rdm(const Matrix& x);

// Cosine distances between every row of a and every row of b (a.rows x b.rows).
Matrix cosine_cross_distances(const Matrix& a, const Matrix& b);

// Row-normalised copy; throws ZeroNormRow.
Matrix normalize_rows(const Matrix& x);

}  // namespace geotax
