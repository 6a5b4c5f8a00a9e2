#pragma once

#include <cstddef>
#include <cstdint>

#include "ad/linalg.hpp"
#include "ad/real.hpp"

namespace ad::bench {

/// Problem data for the Helmholtz energy: a symmetric matrix A, positive
/// coefficients b and a feasible point x (every x_i > 0 and b.x < 1).
struct HelmholtzInstance {
  /// Throws ShapeError on inconsistent sizes and std::invalid_argument when A
  /// is not symmetric to 1e-12, b is not positive or x is infeasible.
  HelmholtzInstance(RealMatrix a, RealVector b, RealVector x);

  /// A = Q^T Q / n with Q_ij ~ U(0,1), b_i ~ U(0.1,1), x = s u with
  /// u_i ~ U(0.1,1) and s chosen so that b.x = 0.5. Same seed, same bytes.
  static HelmholtzInstance generate(std::size_t n, std::uint64_t seed);

  std::size_t n;
  RealMatrix A;
  RealVector b;
  RealVector x;
};

/// f(x) = sum_i x_i log(x_i / (1 - b.x))
///        - x.Ax / (sqrt(8) b.x) * log((1 + (1 + sqrt 2) b.x) / (1 + (1 - sqrt 2) b.x))
///
/// Evaluates at any x of the instance's dimension; the instance's own x is only
/// the default evaluation point. Infeasible points give NaN.
class Helmholtz {
 public:
  explicit Helmholtz(const HelmholtzInstance& inst);

  ADScalar operator()(const ADVector& x) const;

  [[nodiscard]] std::size_t dimension() const { return b_.size(); }

 private:
  ADMatrix a_;
  ADVector b_;
};

}  // namespace ad::bench
