#pragma once

// Central finite-difference counterparts of the differentiation API.
//
// Same names, argument order and shape contracts as the AD operations in
// api.hpp, for every operation that has a numerical form (there is no diffn and
// no jacobianTv here). Functions may be written against ADScalar / ADVector
// (they are evaluated on constants) or against double / RealVector.
//
// Steps are scaled per coordinate: h = base * max(1, |x_i|), rounded so that
// x + h is exact. Non-finite function values propagate as NaN/inf.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <type_traits>
#include <utility>

#include "ad/api.hpp"
#include "ad/errors.hpp"
#include "ad/linalg.hpp"
#include "ad/real.hpp"

namespace ad::numeric {

struct FDConfig {
  /// Base step for first derivatives, cube root of machine epsilon.
  double h1 = std::cbrt(std::numeric_limits<double>::epsilon());
  /// Base step for second derivatives, fourth root of machine epsilon.
  double h2 = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));

  void validate() const {
    if (!(h1 > 0.0) || !std::isfinite(h1) || !(h2 > 0.0) || !std::isfinite(h2))
      throw std::invalid_argument("FDConfig: steps must be positive and finite");
  }
};

template <class F>
concept NumScalarFn = ScalarFn<F> || (std::invocable<F&, double> &&
                                      std::convertible_to<std::invoke_result_t<F&, double>, double>);

template <class F>
concept NumVectorToScalarFn =
    VectorToScalarFn<F> ||
    (std::invocable<F&, const RealVector&> &&
     (std::convertible_to<std::invoke_result_t<F&, const RealVector&>, double> ||
      std::same_as<std::remove_cvref_t<std::invoke_result_t<F&, const RealVector&>>, RealVector>));

template <class F>
concept NumVectorToVectorFn =
    VectorToVectorFn<F> || (std::invocable<F&, const RealVector&> &&
                            std::convertible_to<std::invoke_result_t<F&, const RealVector&>, RealVector>);

namespace detail {

template <class F>
double eval(F& f, double x) {
  if constexpr (ScalarFn<F>)
    return ADScalar(f(ADScalar(x))).value();
  else
    return static_cast<double>(f(x));
}

template <class F>
double evalScalar(F& f, const RealVector& x) {
  if constexpr (VectorToScalarFn<F>) {
    return ad::detail::evalScalar(f, ADVector::constant(x)).value();
  } else {
    using R = std::invoke_result_t<F&, const RealVector&>;
    if constexpr (std::convertible_to<R, double>) {
      return static_cast<double>(f(x));
    } else {
      const RealVector y = f(x);
      if (y.size() != 1)
        throw ShapeError("expected a scalar-valued function, got output length " + std::to_string(y.size()));
      return y[0];
    }
  }
}

template <class F>
RealVector evalVector(F& f, const RealVector& x) {
  if constexpr (VectorToVectorFn<F>)
    return ADVector(f(ADVector::constant(x))).values();
  else
    return RealVector(f(x));
}

// base * max(1, |x|), adjusted so that x + h is exactly representable.
inline double scaledStep(double base, double x) {
  volatile double probe = x + base * std::max(1.0, std::abs(x));
  return probe - x;
}

inline double maxAbs(const RealVector& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline RealVector shifted(RealVector x, std::size_t i, double h) {
  x[i] += h;
  return x;
}

inline RealVector along(const RealVector& x, const RealVector& v, double s) {
  RealVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + s * v[i];
  return out;
}

inline RealVector centralQuotient(const RealVector& plus, const RealVector& minus, double width) {
  if (plus.size() != minus.size())
    throw ContractError("finite differences: output length changed between evaluations");
  RealVector out(plus.size());
  for (std::size_t k = 0; k < plus.size(); ++k) out[k] = (plus[k] - minus[k]) / width;
  return out;
}

// Step along direction v: the largest coordinate perturbation is base * max(1, |x|_inf).
inline double directionalStep(double base, const RealVector& x, const RealVector& v) {
  return base * std::max(1.0, maxAbs(x)) / maxAbs(v);
}

}  // namespace detail

// ===========================================================================
// R -> R

template <NumScalarFn F>
std::pair<double, double> diffPrime(F&& f, double x, const FDConfig& cfg = {}) {
  cfg.validate();
  const double h = detail::scaledStep(cfg.h1, x);
  return {detail::eval(f, x), (detail::eval(f, x + h) - detail::eval(f, x - h)) / (2.0 * h)};
}
template <NumScalarFn F>
double diff(F&& f, double x, const FDConfig& cfg = {}) {
  cfg.validate();
  const double h = detail::scaledStep(cfg.h1, x);
  return (detail::eval(f, x + h) - detail::eval(f, x - h)) / (2.0 * h);
}

template <NumScalarFn F>
std::tuple<double, double, double> diff2PrimePrime(F&& f, double x, const FDConfig& cfg = {}) {
  cfg.validate();
  const double fx = detail::eval(f, x);
  const double h = detail::scaledStep(cfg.h2, x);
  const double second = (detail::eval(f, x + h) - 2.0 * fx + detail::eval(f, x - h)) / (h * h);
  return {fx, numeric::diff(f, x, cfg), second};
}
template <NumScalarFn F>
std::pair<double, double> diff2Prime(F&& f, double x, const FDConfig& cfg = {}) {
  const auto [fx, d1, d2] = numeric::diff2PrimePrime(f, x, cfg);
  return {fx, d2};
}
template <NumScalarFn F>
double diff2(F&& f, double x, const FDConfig& cfg = {}) {
  return numeric::diff2Prime(f, x, cfg).second;
}

// ===========================================================================
// R^n -> R

template <NumVectorToScalarFn F>
RealVector grad(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  cfg.validate();
  RealVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = detail::scaledStep(cfg.h1, x[i]);
    g[i] = (detail::evalScalar(f, detail::shifted(x, i, h)) - detail::evalScalar(f, detail::shifted(x, i, -h))) /
           (2.0 * h);
  }
  return g;
}
template <NumVectorToScalarFn F>
std::pair<double, RealVector> gradPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return {detail::evalScalar(f, x), numeric::grad(f, x, cfg)};
}

template <NumVectorToScalarFn F>
double gradv(F&& f, const RealVector& x, const RealVector& v, const FDConfig& cfg = {}) {
  ad::detail::requireSameLength("gradv (x vs v)", x.size(), v.size());
  cfg.validate();
  if (detail::maxAbs(v) == 0.0) return 0.0;
  const double h = detail::directionalStep(cfg.h1, x, v);
  return (detail::evalScalar(f, detail::along(x, v, h)) - detail::evalScalar(f, detail::along(x, v, -h))) /
         (2.0 * h);
}
template <NumVectorToScalarFn F>
std::pair<double, double> gradvPrime(F&& f, const RealVector& x, const RealVector& v, const FDConfig& cfg = {}) {
  const double d = numeric::gradv(f, x, v, cfg);
  return {detail::evalScalar(f, x), d};
}

/// Central differences of grad along each axis, symmetrized.
template <NumVectorToScalarFn F>
RealMatrix hessian(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = x.size();
  RealMatrix h(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = detail::scaledStep(cfg.h2, x[j]);
    const RealVector col = detail::centralQuotient(numeric::grad(f, detail::shifted(x, j, step), cfg),
                                                   numeric::grad(f, detail::shifted(x, j, -step), cfg), 2.0 * step);
    for (std::size_t i = 0; i < n; ++i) h(i, j) = col[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));
  return h;
}
template <NumVectorToScalarFn F>
std::pair<double, RealMatrix> hessianPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return {detail::evalScalar(f, x), numeric::hessian(f, x, cfg)};
}
template <NumVectorToScalarFn F>
std::pair<RealVector, RealMatrix> gradhessian(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return {numeric::grad(f, x, cfg), numeric::hessian(f, x, cfg)};
}
template <NumVectorToScalarFn F>
std::tuple<double, RealVector, RealMatrix> gradhessianPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return {detail::evalScalar(f, x), numeric::grad(f, x, cfg), numeric::hessian(f, x, cfg)};
}

template <NumVectorToScalarFn F>
RealVector hessianv(F&& f, const RealVector& x, const RealVector& v, const FDConfig& cfg = {}) {
  ad::detail::requireSameLength("hessianv (x vs v)", x.size(), v.size());
  cfg.validate();
  if (detail::maxAbs(v) == 0.0) return RealVector(x.size(), 0.0);
  const double h = detail::directionalStep(cfg.h2, x, v);
  return detail::centralQuotient(numeric::grad(f, detail::along(x, v, h), cfg), numeric::grad(f, detail::along(x, v, -h), cfg),
                                 2.0 * h);
}
template <NumVectorToScalarFn F>
std::pair<double, RealVector> hessianvPrime(F&& f, const RealVector& x, const RealVector& v,
                                            const FDConfig& cfg = {}) {
  RealVector hv = numeric::hessianv(f, x, v, cfg);
  return {detail::evalScalar(f, x), std::move(hv)};
}
template <NumVectorToScalarFn F>
std::pair<double, RealVector> gradhessianv(F&& f, const RealVector& x, const RealVector& v,
                                           const FDConfig& cfg = {}) {
  RealVector hv = numeric::hessianv(f, x, v, cfg);
  return {numeric::gradv(f, x, v, cfg), std::move(hv)};
}
template <NumVectorToScalarFn F>
std::tuple<double, double, RealVector> gradhessianvPrime(F&& f, const RealVector& x, const RealVector& v,
                                                         const FDConfig& cfg = {}) {
  auto [gv, hv] = numeric::gradhessianv(f, x, v, cfg);
  return {detail::evalScalar(f, x), gv, std::move(hv)};
}

/// Sum of axis-aligned second differences.
template <NumVectorToScalarFn F>
std::pair<double, double> laplacianPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  cfg.validate();
  const double fx = detail::evalScalar(f, x);
  double trace = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = detail::scaledStep(cfg.h2, x[i]);
    trace += (detail::evalScalar(f, detail::shifted(x, i, h)) - 2.0 * fx +
              detail::evalScalar(f, detail::shifted(x, i, -h))) /
             (h * h);
  }
  return {fx, trace};
}
template <NumVectorToScalarFn F>
double laplacian(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return numeric::laplacianPrime(f, x, cfg).second;
}

// ===========================================================================
// R^n -> R^m

template <NumVectorToVectorFn F>
std::pair<RealVector, RealMatrix> jacobianPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  cfg.validate();
  RealVector fx = detail::evalVector(f, x);
  const std::size_t m = fx.size();
  const std::size_t n = x.size();
  RealMatrix j(m, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = detail::scaledStep(cfg.h1, x[i]);
    const RealVector col = detail::centralQuotient(detail::evalVector(f, detail::shifted(x, i, h)),
                                                   detail::evalVector(f, detail::shifted(x, i, -h)), 2.0 * h);
    if (col.size() != m) throw ContractError("jacobian: output length changed between evaluations");
    for (std::size_t k = 0; k < m; ++k) j(k, i) = col[k];
  }
  return {std::move(fx), std::move(j)};
}
template <NumVectorToVectorFn F>
RealMatrix jacobian(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return numeric::jacobianPrime(f, x, cfg).second;
}
template <NumVectorToVectorFn F>
std::pair<RealVector, RealMatrix> jacobianTPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  auto [fx, j] = numeric::jacobianPrime(f, x, cfg);
  return {std::move(fx), j.transpose()};
}
template <NumVectorToVectorFn F>
RealMatrix jacobianT(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return numeric::jacobian(f, x, cfg).transpose();
}

template <NumVectorToVectorFn F>
std::pair<RealVector, RealVector> jacobianvPrime(F&& f, const RealVector& x, const RealVector& v,
                                                 const FDConfig& cfg = {}) {
  ad::detail::requireSameLength("jacobianv (x vs v)", x.size(), v.size());
  cfg.validate();
  RealVector fx = detail::evalVector(f, x);
  if (detail::maxAbs(v) == 0.0) return {fx, RealVector(fx.size(), 0.0)};
  const double h = detail::directionalStep(cfg.h1, x, v);
  RealVector jv = detail::centralQuotient(detail::evalVector(f, detail::along(x, v, h)),
                                          detail::evalVector(f, detail::along(x, v, -h)), 2.0 * h);
  if (jv.size() != fx.size()) throw ContractError("jacobianv: output length changed between evaluations");
  return {std::move(fx), std::move(jv)};
}
template <NumVectorToVectorFn F>
RealVector jacobianv(F&& f, const RealVector& x, const RealVector& v, const FDConfig& cfg = {}) {
  return numeric::jacobianvPrime(f, x, v, cfg).second;
}

template <NumVectorToVectorFn F>
std::tuple<RealVector, RealVector, double> curldivPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  ad::detail::requireDimension("curldiv", 3, x.size(), "input");
  auto [fx, j] = numeric::jacobianPrime(f, x, cfg);
  ad::detail::requireDimension("curldiv", 3, fx.size(), "output");
  RealVector c{j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
  return {std::move(fx), std::move(c), j(0, 0) + j(1, 1) + j(2, 2)};
}
template <NumVectorToVectorFn F>
std::pair<RealVector, double> curldiv(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  auto [fx, c, d] = numeric::curldivPrime(f, x, cfg);
  return {std::move(c), d};
}
template <NumVectorToVectorFn F>
std::pair<RealVector, RealVector> curlPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  auto [fx, c, d] = numeric::curldivPrime(f, x, cfg);
  return {std::move(fx), std::move(c)};
}
template <NumVectorToVectorFn F>
RealVector curl(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return std::get<1>(numeric::curldivPrime(f, x, cfg));
}

template <NumVectorToVectorFn F>
std::pair<RealVector, double> divPrime(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  auto [fx, j] = numeric::jacobianPrime(f, x, cfg);
  ad::detail::requireDimension("div", x.size(), fx.size(), "output");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += j(i, i);
  return {std::move(fx), d};
}
template <NumVectorToVectorFn F>
double div(F&& f, const RealVector& x, const FDConfig& cfg = {}) {
  return numeric::divPrime(f, x, cfg).second;
}

}  // namespace ad::numeric


// n-prefixed spellings of the numeric operations, e.g. ngrad(f, x) == numeric::grad(f, x).
namespace ad {

inline constexpr auto ndiff = [](auto&&... args) -> decltype(numeric::diff(std::forward<decltype(args)>(args)...)) {
  return numeric::diff(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndiffPrime = [](auto&&... args) -> decltype(numeric::diffPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::diffPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndiff2 = [](auto&&... args) -> decltype(numeric::diff2(std::forward<decltype(args)>(args)...)) {
  return numeric::diff2(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndiff2Prime = [](auto&&... args) -> decltype(numeric::diff2Prime(std::forward<decltype(args)>(args)...)) {
  return numeric::diff2Prime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndiff2PrimePrime = [](auto&&... args) -> decltype(numeric::diff2PrimePrime(std::forward<decltype(args)>(args)...)) {
  return numeric::diff2PrimePrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngrad = [](auto&&... args) -> decltype(numeric::grad(std::forward<decltype(args)>(args)...)) {
  return numeric::grad(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradPrime = [](auto&&... args) -> decltype(numeric::gradPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::gradPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradv = [](auto&&... args) -> decltype(numeric::gradv(std::forward<decltype(args)>(args)...)) {
  return numeric::gradv(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradvPrime = [](auto&&... args) -> decltype(numeric::gradvPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::gradvPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nhessian = [](auto&&... args) -> decltype(numeric::hessian(std::forward<decltype(args)>(args)...)) {
  return numeric::hessian(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nhessianPrime = [](auto&&... args) -> decltype(numeric::hessianPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::hessianPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradhessian = [](auto&&... args) -> decltype(numeric::gradhessian(std::forward<decltype(args)>(args)...)) {
  return numeric::gradhessian(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradhessianPrime = [](auto&&... args) -> decltype(numeric::gradhessianPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::gradhessianPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nhessianv = [](auto&&... args) -> decltype(numeric::hessianv(std::forward<decltype(args)>(args)...)) {
  return numeric::hessianv(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nhessianvPrime = [](auto&&... args) -> decltype(numeric::hessianvPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::hessianvPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradhessianv = [](auto&&... args) -> decltype(numeric::gradhessianv(std::forward<decltype(args)>(args)...)) {
  return numeric::gradhessianv(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ngradhessianvPrime = [](auto&&... args) -> decltype(numeric::gradhessianvPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::gradhessianvPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nlaplacian = [](auto&&... args) -> decltype(numeric::laplacian(std::forward<decltype(args)>(args)...)) {
  return numeric::laplacian(std::forward<decltype(args)>(args)...);
};
inline constexpr auto nlaplacianPrime = [](auto&&... args) -> decltype(numeric::laplacianPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::laplacianPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobian = [](auto&&... args) -> decltype(numeric::jacobian(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobian(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobianPrime = [](auto&&... args) -> decltype(numeric::jacobianPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobianPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobianT = [](auto&&... args) -> decltype(numeric::jacobianT(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobianT(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobianTPrime = [](auto&&... args) -> decltype(numeric::jacobianTPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobianTPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobianv = [](auto&&... args) -> decltype(numeric::jacobianv(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobianv(std::forward<decltype(args)>(args)...);
};
inline constexpr auto njacobianvPrime = [](auto&&... args) -> decltype(numeric::jacobianvPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::jacobianvPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ncurl = [](auto&&... args) -> decltype(numeric::curl(std::forward<decltype(args)>(args)...)) {
  return numeric::curl(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ncurlPrime = [](auto&&... args) -> decltype(numeric::curlPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::curlPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndiv = [](auto&&... args) -> decltype(numeric::div(std::forward<decltype(args)>(args)...)) {
  return numeric::div(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ndivPrime = [](auto&&... args) -> decltype(numeric::divPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::divPrime(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ncurldiv = [](auto&&... args) -> decltype(numeric::curldiv(std::forward<decltype(args)>(args)...)) {
  return numeric::curldiv(std::forward<decltype(args)>(args)...);
};
inline constexpr auto ncurldivPrime = [](auto&&... args) -> decltype(numeric::curldivPrime(std::forward<decltype(args)>(args)...)) {
  return numeric::curldivPrime(std::forward<decltype(args)>(args)...);
};

}  // namespace ad
