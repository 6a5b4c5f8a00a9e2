#include "ad/real.hpp"

#include <stdexcept>
#include <string>

#include "ad/errors.hpp"

namespace ad {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw ShapeError("RealMatrix: " + std::to_string(data_.size()) + " elements for a " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double RealMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("RealMatrix::at");
  return (*this)(i, j);
}

RealVector RealMatrix::row(std::size_t i) const {
  if (i >= rows_) throw std::out_of_range("RealMatrix::row");
  return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

RealVector RealMatrix::col(std::size_t j) const {
  if (j >= cols_) throw std::out_of_range("RealMatrix::col");
  RealVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

RealMatrix RealMatrix::transpose() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double RealMatrix::trace() const {
  if (rows_ != cols_) detail::throwLengthMismatch("RealMatrix::trace (rows vs cols)", rows_, cols_);
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
  return s;
}

RealVector operator*(const RealMatrix& m, const RealVector& v) {
  detail::requireSameLength("RealMatrix * RealVector", m.cols(), v.size());
  RealVector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
  detail::requireSameLength("RealMatrix * RealMatrix (inner dimension)", a.cols(), b.rows());
  RealMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

std::ostream& operator<<(std::ostream& os, const RealMatrix& m) {
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
  }
  return os << "]";
}

}  // namespace ad
