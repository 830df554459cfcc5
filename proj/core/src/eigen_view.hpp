#pragma once

#include <Eigen/Dense>

#include "geotax/matrix.hpp"

namespace geotax::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMatrix> view(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

inline Eigen::Map<RowMatrix> view(Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

template <class Derived>
Matrix to_matrix(const Eigen::MatrixBase<Derived>& e) {
  Matrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  view(out) = e;
  return out;
}

}  // namespace geotax::detail
