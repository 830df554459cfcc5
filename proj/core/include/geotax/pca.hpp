#pragma once

#include <cstddef>
#include <vector>

#include "geotax/matrix.hpp"

namespace geotax {

struct PcaResult {
  Matrix scores;                    // n x k projected data
  Matrix components;                // k x d, unit rows
  std::vector<double> mean;         // d
  std::vector<double> singular_values;
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;
  std::size_t numerical_rank = 0;
  bool rank_deficient = false;      // fewer than k components were available
};

// Centre, project onto the top-k principal axes (descending variance). Each
// axis is signed so its largest-magnitude loading is positive. When k exceeds
// the numerical rank only the available components are returned and
// rank_deficient is set; k > min(n, d) throws RankDeficient.
PcaResult pca_project(const Matrix& x, std::size_t k);

}  // namespace geotax
