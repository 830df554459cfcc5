#include "geotax/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eigen_view.hpp"
#include "geotax/error.hpp"

namespace geotax {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> condensed)
    : n_(n), condensed_(std::move(condensed)) {
  require(condensed_.size() == n * (n - 1) / 2 || (n == 0 && condensed_.empty()),
          ErrorCode::DimensionMismatch, "condensed distance vector has the wrong length");
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  // Offset of row i in the condensed upper triangle.
  const std::size_t offset = i * n_ - i * (i + 1) / 2;
  return condensed_[offset + (j - i - 1)];
}

Matrix normalize_rows(const Matrix& x) {
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = out.row(r);
    double ss = 0.0;
    for (double v : row) ss += v * v;
    const double norm = std::sqrt(ss);
    if (!(norm >= kZeroNormThreshold)) {
      fail(ErrorCode::ZeroNormRow, "row " + std::to_string(r) + " has zero norm");
    }
    for (double& v : row) v /= norm;
  }
  return out;
}

DistanceMatrix cosine_rdm(const Matrix& x) {
  const std::size_t n = x.rows();
  const Matrix unit = normalize_rows(x);
  const auto u = detail::view(unit);
  const detail::RowMatrix gram = u * u.transpose();
  std::vector<double> condensed;
  condensed.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      condensed.push_back(std::clamp(d, 0.0, 2.0));
    }
  }
  return DistanceMatrix(n, std::move(condensed));
}

Matrix cosine_cross_distances(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorCode::DimensionMismatch, "cross distance dimensions");
  const Matrix ua = normalize_rows(a);
  const Matrix ub = normalize_rows(b);
  Matrix out = detail::to_matrix(detail::view(ua) * detail::view(ub).transpose());
  for (double& v : out.data()) v = std::clamp(1.0 - v, 0.0, 2.0);
  return out;
}

}  // namespace geotax
