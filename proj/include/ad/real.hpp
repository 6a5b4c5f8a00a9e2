#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

namespace ad {

using RealVector = std::vector<double>;

/// Plain dense row-major matrix returned by the differentiation API.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-major data; throws ShapeError unless data.size() == rows * cols.
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static RealMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] const std::vector<double>& data() const { return data_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  /// Bounds-checked access.
  [[nodiscard]] double at(std::size_t i, std::size_t j) const;

  [[nodiscard]] RealVector row(std::size_t i) const;
  [[nodiscard]] RealVector col(std::size_t j) const;
  [[nodiscard]] RealMatrix transpose() const;
  [[nodiscard]] double trace() const;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

RealVector operator*(const RealMatrix& m, const RealVector& v);
RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);

std::ostream& operator<<(std::ostream& os, const RealMatrix& m);

}  // namespace ad
