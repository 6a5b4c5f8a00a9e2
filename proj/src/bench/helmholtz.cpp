#include "ad/bench/helmholtz.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ad/errors.hpp"

namespace ad::bench {

HelmholtzInstance::HelmholtzInstance(RealMatrix a, RealVector b, RealVector x)
    : n(x.size()), A(std::move(a)), b(std::move(b)), x(std::move(x)) {
  if (A.rows() != n || A.cols() != n)
    throw ShapeError("HelmholtzInstance: A is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                     ", expected " + std::to_string(n) + "x" + std::to_string(n));
  detail::requireSameLength("HelmholtzInstance (b vs x)", this->b.size(), n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(A(i, j) - A(j, i)) > 1e-12 * std::max(1.0, std::abs(A(i, j))))
        throw std::invalid_argument("HelmholtzInstance: A is not symmetric");
  double bx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(this->b[i] > 0.0)) throw std::invalid_argument("HelmholtzInstance: b must be positive");
    if (!(this->x[i] > 0.0)) throw std::invalid_argument("HelmholtzInstance: x must be positive");
    bx += this->b[i] * this->x[i];
  }
  if (!(bx < 1.0)) throw std::invalid_argument("HelmholtzInstance: b.x must be below 1");
}

HelmholtzInstance HelmholtzInstance::generate(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> positive(0.1, 1.0);

  RealMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = unit(rng);

  RealMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q(k, i) * q(k, j);
      a(i, j) = s / static_cast<double>(n);
      a(j, i) = a(i, j);
    }
  }

  RealVector b(n);
  for (double& e : b) e = positive(rng);
  RealVector x(n);
  for (double& e : x) e = positive(rng);
  double bu = 0.0;
  for (std::size_t i = 0; i < n; ++i) bu += b[i] * x[i];
  const double s = n == 0 ? 1.0 : 0.5 / bu;
  for (double& e : x) e *= s;
  return HelmholtzInstance(std::move(a), std::move(b), std::move(x));
}

Helmholtz::Helmholtz(const HelmholtzInstance& inst) : a_(ADMatrix::constant(inst.A)), b_(ADVector::constant(inst.b)) {}

ADScalar Helmholtz::operator()(const ADVector& x) const {
  static const double sqrt2 = std::sqrt(2.0);
  static const double sqrt8 = std::sqrt(8.0);
  const ADScalar bx = dot(b_, x);
  const ADScalar rest = 1.0 - bx;
  const ADVector logs = map([&](const ADScalar& xi) { return log(xi / rest); }, x);
  const ADScalar xax = dot(x, matVec(a_, x));
  const ADScalar ratio = log((1.0 + (1.0 + sqrt2) * bx) / (1.0 + (1.0 - sqrt2) * bx));
  return dot(x, logs) - xax / (sqrt8 * bx) * ratio;
}

}  // namespace ad::bench
