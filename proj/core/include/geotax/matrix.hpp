#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace geotax {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::vector<double> col(std::size_t c) const;

  Matrix select_rows(std::span<const std::size_t> idx) const;
  Matrix select_cols(std::span<const std::size_t> idx) const;
  Matrix transpose() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm(const Matrix& a);
Matrix identity(std::size_t n);

// n x d embedding matrix with optional per-row class labels. Values are
// validated finite on construction and the matrix is immutable afterwards.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(Matrix values,
                           std::optional<std::vector<std::uint32_t>> labels = std::nullopt);

  std::size_t n() const noexcept { return values_.rows(); }
  std::size_t d() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  const std::optional<std::vector<std::uint32_t>>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return labels_.has_value(); }

  EmbeddingMatrix select_rows(std::span<const std::size_t> idx) const;

  bool operator==(const EmbeddingMatrix& other) const = default;

 private:
  Matrix values_;
  std::optional<std::vector<std::uint32_t>> labels_;
};

}  // namespace geotax
