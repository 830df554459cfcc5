#include "geotax/matrix.hpp"

#include <cmath>
#include <string>

#include "eigen_view.hpp"
#include "geotax/error.hpp"

namespace geotax {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, ErrorCode::DimensionMismatch,
          "matrix data has " + std::to_string(data_.size()) + " values, expected " +
              std::to_string(rows * cols));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == cols, ErrorCode::DimensionMismatch, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = rows[r][c];
  }
  return out;
}

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, "matrix product shape");
  return detail::to_matrix(detail::view(a) * detail::view(b));
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "matrix difference shape");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "matrix sum shape");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

double frobenius_norm(const Matrix& a) { return detail::view(a).norm(); }

Matrix identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

EmbeddingMatrix::EmbeddingMatrix(Matrix values, std::optional<std::vector<std::uint32_t>> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  require(values_.rows() >= 1 && values_.cols() >= 1, ErrorCode::DimensionMismatch,
          "embedding matrix must be at least 1x1");
  for (std::size_t i = 0; i < values_.data().size(); ++i) {
    if (!std::isfinite(values_.data()[i])) {
      fail(ErrorCode::DegenerateInput,
           "non-finite value at row " + std::to_string(i / values_.cols()) + ", column " +
               std::to_string(i % values_.cols()));
    }
  }
  if (labels_) {
    require(labels_->size() == values_.rows(), ErrorCode::DimensionMismatch,
            "label count " + std::to_string(labels_->size()) + " != n " +
                std::to_string(values_.rows()));
  }
}

EmbeddingMatrix EmbeddingMatrix::select_rows(std::span<const std::size_t> idx) const {
  std::optional<std::vector<std::uint32_t>> labels;
  if (labels_) {
    labels.emplace();
    labels->reserve(idx.size());
    for (std::size_t i : idx) labels->push_back((*labels_)[i]);
  }
  return EmbeddingMatrix(values_.select_rows(idx), std::move(labels));
}

}  // namespace geotax
