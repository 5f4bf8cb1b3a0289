#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "threshaug/error.hpp"

namespace threshaug {

/// Dense row-major matrix of doubles. Rows are contiguous so a row can be
/// handed out as a span and the buffer passed straight through the C API.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorCode::Dimension, "matrix buffer size does not match shape");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  /// Rows picked by index, in the given order (duplicates allowed).
  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  /// [this | right], row counts must agree.
  Matrix hconcat(const Matrix& right) const {
    if (right.rows_ != rows_) {
      throw Error(ErrorCode::Dimension, "hconcat row count mismatch");
    }
    Matrix out(rows_, cols_ + right.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      auto dst = out.row(r);
      auto a = row(r);
      auto b = right.row(r);
      std::copy(a.begin(), a.end(), dst.begin());
      std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(cols_));
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> select(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace threshaug
