#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "ad/real.hpp"
#include "ad/scalar.hpp"

namespace ad {

/// Immutable dense vector of ADScalar. Copies share storage.
class ADVector {
 public:
  ADVector();
  explicit ADVector(std::vector<ADScalar> elems);
  ADVector(std::initializer_list<ADScalar> elems);
  /// n zeros.
  explicit ADVector(std::size_t n);

  static ADVector constant(std::span<const double> values);

  [[nodiscard]] std::size_t size() const { return data_->size(); }
  [[nodiscard]] bool empty() const { return data_->empty(); }
  /// Bounds-checked.
  [[nodiscard]] const ADScalar& operator[](std::size_t i) const;
  [[nodiscard]] std::span<const ADScalar> elements() const { return *data_; }
  [[nodiscard]] auto begin() const { return data_->cbegin(); }
  [[nodiscard]] auto end() const { return data_->cend(); }

  /// Innermost real values.
  [[nodiscard]] RealVector values() const;

  [[nodiscard]] const std::shared_ptr<const std::vector<ADScalar>>& storage() const { return data_; }

 private:
  std::shared_ptr<const std::vector<ADScalar>> data_;
};

/// Immutable dense row-major matrix of ADScalar. Copies share storage.
class ADMatrix {
 public:
  ADMatrix();
  /// Row-major elements; throws ShapeError unless elems.size() == rows * cols.
  ADMatrix(std::size_t rows, std::size_t cols, std::vector<ADScalar> elems);
  /// rows x cols zeros.
  ADMatrix(std::size_t rows, std::size_t cols);

  static ADMatrix constant(const RealMatrix& m);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  /// Bounds-checked.
  [[nodiscard]] const ADScalar& operator()(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::span<const ADScalar> row(std::size_t i) const;
  [[nodiscard]] std::span<const ADScalar> elements() const { return *data_; }

  [[nodiscard]] RealMatrix values() const;

  [[nodiscard]] const std::shared_ptr<const std::vector<ADScalar>>& storage() const { return data_; }

  /// Row-major values when every element is a plain constant, otherwise null.
  [[nodiscard]] const std::shared_ptr<const std::vector<double>>& constantValues() const { return constant_; }

 private:
  void detectConstant();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const std::vector<ADScalar>> data_;
  std::shared_ptr<const std::vector<double>> constant_;
};

// Shapes must match exactly; there is no broadcasting. Mismatches throw
// ShapeError naming both shapes.

ADVector operator+(const ADVector& a, const ADVector& b);
ADVector operator-(const ADVector& a, const ADVector& b);
ADVector operator-(const ADVector& a);
ADVector operator*(const ADScalar& s, const ADVector& v);
ADVector operator*(const ADVector& v, const ADScalar& s);
ADVector operator/(const ADVector& v, const ADScalar& s);
inline ADVector scale(const ADScalar& s, const ADVector& v) { return s * v; }

/// Inner product; Constant(0) for empty vectors. Recorded as a single node.
ADScalar dot(const ADVector& a, const ADVector& b);
ADScalar dot(std::span<const ADScalar> a, std::span<const ADScalar> b);
/// Sum of the elements. Recorded as a single node.
ADScalar sum(const ADVector& v);
ADScalar l2norm(const ADVector& v);

/// Elementwise product.
ADVector hadamard(const ADVector& a, const ADVector& b);

/// Shape-preserving elementwise application of a scalar function.
template <class F>
ADVector map(F&& f, const ADVector& v) {
  std::vector<ADScalar> out;
  out.reserve(v.size());
  for (const ADScalar& x : v) out.push_back(f(x));
  return ADVector(std::move(out));
}

template <class F>
ADMatrix map(F&& f, const ADMatrix& m) {
  std::vector<ADScalar> out;
  out.reserve(m.elements().size());
  for (const ADScalar& x : m.elements()) out.push_back(f(x));
  return ADMatrix(m.rows(), m.cols(), std::move(out));
}

ADMatrix operator+(const ADMatrix& a, const ADMatrix& b);
ADMatrix operator-(const ADMatrix& a, const ADMatrix& b);
ADMatrix operator*(const ADScalar& s, const ADMatrix& m);
ADMatrix hadamard(const ADMatrix& a, const ADMatrix& b);

/// M v. When M is constant with respect to v's youngest tag, each output row
/// is a single node sharing v's parent list and pointing into M's storage.
ADVector matVec(const ADMatrix& m, const ADVector& v);
ADMatrix matMul(const ADMatrix& a, const ADMatrix& b);
ADMatrix transpose(const ADMatrix& m);
inline ADVector operator*(const ADMatrix& m, const ADVector& v) { return matVec(m, v); }
inline ADMatrix operator*(const ADMatrix& a, const ADMatrix& b) { return matMul(a, b); }

}  // namespace ad
