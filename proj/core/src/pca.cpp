#include "geotax/pca.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eigen_view.hpp"
#include "geotax/error.hpp"

namespace geotax {

PcaResult pca_project(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  require(n >= 1 && d >= 1, ErrorCode::InvalidArgument, "pca on empty matrix");
  if (k > std::min(n, d)) {
    fail(ErrorCode::RankDeficient, "requested " + std::to_string(k) +
                                       " components but min(n, d) = " +
                                       std::to_string(std::min(n, d)));
  }

  PcaResult result;
  result.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) result.mean[c] += x(r, c);
  for (double& m : result.mean) m /= static_cast<double>(n);

  detail::RowMatrix centered = detail::view(x);
  for (std::size_t c = 0; c < d; ++c) centered.col(static_cast<Eigen::Index>(c)).array() -= result.mean[c];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(centered), Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();

  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double tol = static_cast<double>(std::max(n, d)) * std::numeric_limits<double>::epsilon() * smax;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol && s(i) > 0.0) ++rank;
  result.numerical_rank = rank;

  const std::size_t kept = std::min(k, rank);
  result.rank_deficient = kept < k;

  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += s(i) * s(i);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;

  result.components = Matrix(kept, d);
  for (std::size_t c = 0; c < kept; ++c) {
    Eigen::VectorXd axis = v.col(static_cast<Eigen::Index>(c));
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < axis.size(); ++j)
      if (std::abs(axis(j)) > std::abs(axis(arg))) arg = j;
    if (axis(arg) < 0.0) axis = -axis;
    for (std::size_t j = 0; j < d; ++j) result.components(c, j) = axis(static_cast<Eigen::Index>(j));
    const double sv = s(static_cast<Eigen::Index>(c));
    result.singular_values.push_back(sv);
    result.explained_variance.push_back(sv * sv / denom);
    result.explained_variance_ratio.push_back(total > 0.0 ? sv * sv / total : 0.0);
  }

  result.scores = detail::to_matrix(centered * detail::view(result.components).transpose());
  return result;
}

}  // namespace geotax
