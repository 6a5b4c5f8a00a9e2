#pragma once

// Functional differentiation API.
//
// Every operation comes in two forms with the same name:
//   * plain:  takes double / RealVector, returns double / RealVector / RealMatrix;
//   * lifted: takes ADScalar / ADVector and returns AD values, so calls nest
//             (grad of a function that itself calls gradv, and so on).
// Each call creates its own tag(s) and tape(s) and strips them from the result.
// A `...Prime` variant also returns the function value from the same
// evaluation; `...PrimePrime` returns one more component.
//
//   R -> R        diff, diffPrime                       forward
//                 diff2, diff2Prime, diff2PrimePrime    forward over forward
//                 diffn, diffnPrime                     n nested forward
//   R^n -> R      grad, gradPrime                       reverse
//                 gradv, gradvPrime                     forward
//                 hessian, hessianPrime                 forward on reverse
//                 hessianv, hessianvPrime               reverse on forward
//                 gradhessian, gradhessianPrime         forward on reverse
//                 gradhessianv, gradhessianvPrime       reverse on forward
//                 laplacian, laplacianPrime             forward on reverse
//   R^n -> R^m    jacobian, jacobianPrime               forward if n <= m, else reverse
//                 jacobianT, jacobianTPrime             as jacobian
//                 jacobianv, jacobianvPrime             forward
//                 jacobianTv, jacobianTvPrime           reverse
//                 jacobianTvPrimePrime                  reverse, returns a reusable Pullback
//                 curl, curlPrime, div, divPrime,
//                 curldiv, curldivPrime                 forward
//
// jacobianForward / jacobianReverse force one mode.

#include <concepts>
#include <cstddef>
#include <memory>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "ad/errors.hpp"
#include "ad/linalg.hpp"
#include "ad/real.hpp"
#include "ad/scalar.hpp"
#include "ad/tape.hpp"

namespace ad {

template <class F>
concept ScalarFn = std::invocable<F&, const ADScalar&> &&
                   std::convertible_to<std::invoke_result_t<F&, const ADScalar&>, ADScalar>;

/// Scalar-valued function of a vector. Returning a length-1 ADVector is also
/// accepted; any other length is a ShapeError at evaluation time.
template <class F>
concept VectorToScalarFn =
    std::invocable<F&, const ADVector&> &&
    (std::convertible_to<std::invoke_result_t<F&, const ADVector&>, ADScalar> ||
     std::same_as<std::remove_cvref_t<std::invoke_result_t<F&, const ADVector&>>, ADVector>);

template <class F>
concept VectorToVectorFn = std::invocable<F&, const ADVector&> &&
                           std::convertible_to<std::invoke_result_t<F&, const ADVector&>, ADVector>;

namespace detail {

template <class F>
ADScalar evalScalar(F& f, const ADVector& x) {
  using R = std::invoke_result_t<F&, const ADVector&>;
  if constexpr (std::convertible_to<R, ADScalar>) {
    return f(x);
  } else {
    const ADVector y = f(x);
    if (y.size() != 1)
      throw ShapeError("expected a scalar-valued function, got output length " + std::to_string(y.size()));
    return y[0];
  }
}

template <class F>
ADVector evalVector(F& f, const ADVector& x) {
  return ADVector(f(x));
}

inline ADVector duals(Tape& tape, const ADVector& x, const ADVector& v) {
  std::vector<ADScalar> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(tape.dual(x.elements()[i], v.elements()[i]));
  return ADVector(std::move(out));
}

// x with a unit tangent on coordinate i only.
inline ADVector basisDuals(Tape& tape, const ADVector& x, std::size_t i) {
  std::vector<ADScalar> out(x.begin(), x.end());
  out[i] = tape.dual(out[i], 1.0);
  return ADVector(std::move(out));
}

inline ADVector leaves(Tape& tape, const ADVector& x) { return ADVector(makeReverseInputs(tape, x.elements())); }

inline ADVector primals(const Tape& tape, const ADVector& y) {
  std::vector<ADScalar> out;
  out.reserve(y.size());
  for (const ADScalar& e : y) out.push_back(tape.primalOf(e));
  return ADVector(std::move(out));
}

inline std::vector<ADScalar> tangents(const Tape& tape, const ADVector& y) {
  std::vector<ADScalar> out;
  out.reserve(y.size());
  for (const ADScalar& e : y) out.push_back(tape.tangentOf(e));
  return out;
}

inline ADVector adjoints(const Tape& tape, const ADVector& leaves) {
  std::vector<ADScalar> out;
  out.reserve(leaves.size());
  for (const ADScalar& e : leaves) out.push_back(tape.adjoint(e));
  return ADVector(std::move(out));
}

inline void sweepWithSeeds(Tape& tape, const ADVector& outputs, const ADVector& seeds) {
  std::vector<std::pair<ADScalar, ADScalar>> pairs;
  pairs.reserve(outputs.size());
  for (std::size_t j = 0; j < outputs.size(); ++j) pairs.emplace_back(outputs.elements()[j], seeds.elements()[j]);
  tape.sweep(pairs);
}

inline void requireOutputLength(const char* what, std::size_t expected, std::size_t got) {
  if (expected != got)
    throw ContractError(std::string(what) + ": output length changed between evaluations (" +
                        std::to_string(expected) + " then " + std::to_string(got) + ")");
}

inline ADMatrix fromColumns(std::size_t rows, const std::vector<std::vector<ADScalar>>& columns) {
  std::vector<ADScalar> out(rows * columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) out[i * columns.size() + j] = columns[j][i];
  return ADMatrix(rows, columns.size(), std::move(out));
}

inline ADVector lift(const RealVector& x) { return ADVector::constant(x); }
inline double real(const ADScalar& x) { return x.value(); }
inline RealVector real(const ADVector& x) { return x.values(); }
inline RealMatrix real(const ADMatrix& m) { return m.values(); }

// One forward pass seeded with e_i: (f(x), column i of the Jacobian).
template <class F>
std::pair<ADVector, std::vector<ADScalar>> forwardColumn(F& f, const ADVector& x, std::size_t i) {
  auto tape = Tape::create(Mode::Forward);
  const ADVector y = evalVector(f, basisDuals(*tape, x, i));
  return {primals(*tape, y), tangents(*tape, y)};
}

template <class F>
std::pair<ADVector, ADMatrix> forwardJacobianFrom(F& f, const ADVector& x, ADVector fx,
                                                  std::vector<ADScalar> firstColumn) {
  const std::size_t n = x.size();
  const std::size_t m = fx.size();
  std::vector<std::vector<ADScalar>> columns;
  columns.reserve(n);
  columns.push_back(std::move(firstColumn));
  for (std::size_t i = 1; i < n; ++i) {
    auto [yi, col] = forwardColumn(f, x, i);
    requireOutputLength("jacobian", m, yi.size());
    columns.push_back(std::move(col));
  }
  return {std::move(fx), fromColumns(m, columns)};
}

}  // namespace detail

// ===========================================================================
// R -> R

/// (f(x), f'(x)) from one dual evaluation with tangent seed 1.
template <ScalarFn F>
std::pair<ADScalar, ADScalar> diffPrime(F&& f, const ADScalar& x) {
  auto tape = Tape::create(Mode::Forward);
  const ADScalar y = f(tape->dual(x, 1.0));
  return {tape->primalOf(y), tape->tangentOf(y)};
}
template <ScalarFn F>
ADScalar diff(F&& f, const ADScalar& x) {
  return diffPrime(f, x).second;
}

/// (f, f', f'') from diff nested inside diff under two distinct tags.
template <ScalarFn F>
std::tuple<ADScalar, ADScalar, ADScalar> diff2PrimePrime(F&& f, const ADScalar& x) {
  auto outer = Tape::create(Mode::Forward);
  const auto [v, d] = diffPrime(f, outer->dual(x, 1.0));
  return {outer->primalOf(v), outer->primalOf(d), outer->tangentOf(d)};
}
template <ScalarFn F>
std::pair<ADScalar, ADScalar> diff2Prime(F&& f, const ADScalar& x) {
  const auto [v, d1, d2] = diff2PrimePrime(f, x);
  return {v, d2};
}
template <ScalarFn F>
ADScalar diff2(F&& f, const ADScalar& x) {
  return std::get<2>(diff2PrimePrime(f, x));
}

/// (f(x), f^(n)(x)) by n-fold nesting of forward mode. Cost grows as 2^n.
template <ScalarFn F>
std::pair<ADScalar, ADScalar> diffnPrime(std::size_t n, F&& f, const ADScalar& x) {
  if (n == 0) {
    const ADScalar y = f(x);
    return {y, y};
  }
  auto tape = Tape::create(Mode::Forward);
  const auto [v, d] = diffnPrime(n - 1, f, tape->dual(x, 1.0));
  return {tape->primalOf(v), tape->tangentOf(d)};
}
template <ScalarFn F>
ADScalar diffn(std::size_t n, F&& f, const ADScalar& x) {
  return diffnPrime(n, f, x).second;
}

// ===========================================================================
// R^n -> R

/// (f(x), grad f(x)): one evaluation over reverse leaves and one sweep.
template <VectorToScalarFn F>
std::pair<ADScalar, ADVector> gradPrime(F&& f, const ADVector& x) {
  auto tape = Tape::create(Mode::Reverse);
  const ADVector in = detail::leaves(*tape, x);
  const ADScalar y = detail::evalScalar(f, in);
  tape->sweep(y, 1.0);
  return {tape->primalOf(y), detail::adjoints(*tape, in)};
}
template <VectorToScalarFn F>
ADVector grad(F&& f, const ADVector& x) {
  return gradPrime(f, x).second;
}

/// (f(x), grad f(x) . v) from one dual evaluation seeded with v.
template <VectorToScalarFn F>
std::pair<ADScalar, ADScalar> gradvPrime(F&& f, const ADVector& x, const ADVector& v) {
  detail::requireSameLength("gradv (x vs v)", x.size(), v.size());
  auto tape = Tape::create(Mode::Forward);
  const ADScalar y = detail::evalScalar(f, detail::duals(*tape, x, v));
  return {tape->primalOf(y), tape->tangentOf(y)};
}
template <VectorToScalarFn F>
ADScalar gradv(F&& f, const ADVector& x, const ADVector& v) {
  return gradvPrime(f, x, v).second;
}

/// (f(x), grad f(x), H(x)). Column i of H is the forward directional
/// derivative along e_i of the reverse-mode gradient.
template <VectorToScalarFn F>
std::tuple<ADScalar, ADVector, ADMatrix> gradhessianPrime(F&& f, const ADVector& x) {
  const std::size_t n = x.size();
  if (n == 0) return {detail::evalScalar(f, x), ADVector(), ADMatrix()};
  ADScalar value;
  ADVector g;
  std::vector<std::vector<ADScalar>> columns;
  columns.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto tape = Tape::create(Mode::Forward);
    const auto [v, gi] = gradPrime(f, detail::basisDuals(*tape, x, i));
    columns.push_back(detail::tangents(*tape, gi));
    if (i == 0) {
      value = tape->primalOf(v);
      g = detail::primals(*tape, gi);
    }
  }
  return {value, g, detail::fromColumns(n, columns)};
}
template <VectorToScalarFn F>
std::pair<ADVector, ADMatrix> gradhessian(F&& f, const ADVector& x) {
  auto [v, g, h] = gradhessianPrime(f, x);
  return {std::move(g), std::move(h)};
}
template <VectorToScalarFn F>
std::pair<ADScalar, ADMatrix> hessianPrime(F&& f, const ADVector& x) {
  auto [v, g, h] = gradhessianPrime(f, x);
  return {v, std::move(h)};
}
template <VectorToScalarFn F>
ADMatrix hessian(F&& f, const ADVector& x) {
  return std::get<2>(gradhessianPrime(f, x));
}

/// (f(x), grad f . v, H v): reverse sweep over the forward directional
/// evaluation. Cost is one gradient-like pass regardless of n.
template <VectorToScalarFn F>
std::tuple<ADScalar, ADScalar, ADVector> gradhessianvPrime(F&& f, const ADVector& x, const ADVector& v) {
  detail::requireSameLength("hessianv (x vs v)", x.size(), v.size());
  auto rev = Tape::create(Mode::Reverse);
  const ADVector in = detail::leaves(*rev, x);
  auto fwd = Tape::create(Mode::Forward);
  const ADScalar y = detail::evalScalar(f, detail::duals(*fwd, in, v));
  const ADScalar fx = fwd->primalOf(y);
  const ADScalar gv = fwd->tangentOf(y);
  rev->sweep(gv, 1.0);
  return {rev->primalOf(fx), rev->primalOf(gv), detail::adjoints(*rev, in)};
}
template <VectorToScalarFn F>
std::pair<ADScalar, ADVector> gradhessianv(F&& f, const ADVector& x, const ADVector& v) {
  auto [fx, gv, hv] = gradhessianvPrime(f, x, v);
  return {gv, std::move(hv)};
}
template <VectorToScalarFn F>
std::pair<ADScalar, ADVector> hessianvPrime(F&& f, const ADVector& x, const ADVector& v) {
  auto [fx, gv, hv] = gradhessianvPrime(f, x, v);
  return {fx, std::move(hv)};
}
template <VectorToScalarFn F>
ADVector hessianv(F&& f, const ADVector& x, const ADVector& v) {
  return std::get<2>(gradhessianvPrime(f, x, v));
}

/// (f(x), tr H(x)) as the sum of e_i . (H e_i) over n forward-on-reverse
/// Hessian-vector products; H itself is never stored.
template <VectorToScalarFn F>
std::pair<ADScalar, ADScalar> laplacianPrime(F&& f, const ADVector& x) {
  const std::size_t n = x.size();
  if (n == 0) return {detail::evalScalar(f, x), 0.0};
  ADScalar value;
  ADScalar trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto tape = Tape::create(Mode::Forward);
    const auto [v, gi] = gradPrime(f, detail::basisDuals(*tape, x, i));
    trace = trace + tape->tangentOf(gi.elements()[i]);
    if (i == 0) value = tape->primalOf(v);
  }
  return {value, trace};
}
template <VectorToScalarFn F>
ADScalar laplacian(F&& f, const ADVector& x) {
  return laplacianPrime(f, x).second;
}

// ===========================================================================
// R^n -> R^m

/// Reusable J^T(.) captured from one recorded evaluation. Invoking it runs a
/// sweep only; the function is never re-evaluated. Calls on one Pullback must
/// not overlap.
class Pullback {
 public:
  Pullback(std::shared_ptr<Tape> tape, ADVector inputs, ADVector outputs)
      : tape_(std::move(tape)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {}

  [[nodiscard]] std::size_t inputSize() const { return inputs_.size(); }
  [[nodiscard]] std::size_t outputSize() const { return outputs_.size(); }

  /// J^T v. Throws ShapeError unless |v| equals the output length.
  ADVector operator()(const ADVector& v) const {
    detail::requireSameLength("pullback (seed vs outputs)", v.size(), outputs_.size());
    detail::sweepWithSeeds(*tape_, outputs_, v);
    return detail::adjoints(*tape_, inputs_);
  }
  RealVector operator()(const RealVector& v) const { return (*this)(detail::lift(v)).values(); }

 private:
  std::shared_ptr<Tape> tape_;
  ADVector inputs_;
  ADVector outputs_;
};

/// (f(x), J^T(.)) from a single evaluation of f.
template <VectorToVectorFn F>
std::pair<ADVector, Pullback> jacobianTvPrimePrime(F&& f, const ADVector& x) {
  auto tape = Tape::create(Mode::Reverse);
  ADVector in = detail::leaves(*tape, x);
  ADVector y = detail::evalVector(f, in);
  ADVector fx = detail::primals(*tape, y);
  return {std::move(fx), Pullback(std::move(tape), std::move(in), std::move(y))};
}

/// (f(x), J^T v) from one reverse sweep seeded with v; |v| must equal m.
template <VectorToVectorFn F>
std::pair<ADVector, ADVector> jacobianTvPrime(F&& f, const ADVector& x, const ADVector& v) {
  auto [fx, pullback] = jacobianTvPrimePrime(f, x);
  return {std::move(fx), pullback(v)};
}
template <VectorToVectorFn F>
ADVector jacobianTv(F&& f, const ADVector& x, const ADVector& v) {
  return jacobianTvPrime(f, x, v).second;
}

/// (f(x), J v) from one dual evaluation seeded with v.
template <VectorToVectorFn F>
std::pair<ADVector, ADVector> jacobianvPrime(F&& f, const ADVector& x, const ADVector& v) {
  detail::requireSameLength("jacobianv (x vs v)", x.size(), v.size());
  auto tape = Tape::create(Mode::Forward);
  const ADVector y = detail::evalVector(f, detail::duals(*tape, x, v));
  return {detail::primals(*tape, y), ADVector(detail::tangents(*tape, y))};
}
template <VectorToVectorFn F>
ADVector jacobianv(F&& f, const ADVector& x, const ADVector& v) {
  return jacobianvPrime(f, x, v).second;
}

/// (f(x), J) column by column: n forward passes.
template <VectorToVectorFn F>
std::pair<ADVector, ADMatrix> jacobianForwardPrime(F&& f, const ADVector& x) {
  if (x.empty()) {
    ADVector y = detail::evalVector(f, x);
    const std::size_t m = y.size();
    return {std::move(y), ADMatrix(m, 0)};
  }
  auto [fx, col] = detail::forwardColumn(f, x, 0);
  return detail::forwardJacobianFrom(f, x, std::move(fx), std::move(col));
}

/// (f(x), J) row by row: one recorded evaluation, m sweeps.
template <VectorToVectorFn F>
std::pair<ADVector, ADMatrix> jacobianReversePrime(F&& f, const ADVector& x) {
  const std::size_t n = x.size();
  auto [fx, pullback] = jacobianTvPrimePrime(f, x);
  const std::size_t m = fx.size();
  std::vector<ADScalar> rows;
  rows.reserve(m * n);
  std::vector<ADScalar> seed(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    seed[j] = 1.0;
    const ADVector row = pullback(ADVector(seed));
    seed[j] = 0.0;
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return {std::move(fx), ADMatrix(m, n, std::move(rows))};
}

template <VectorToVectorFn F>
ADMatrix jacobianForward(F&& f, const ADVector& x) {
  return jacobianForwardPrime(f, x).second;
}
template <VectorToVectorFn F>
ADMatrix jacobianReverse(F&& f, const ADVector& x) {
  return jacobianReversePrime(f, x).second;
}

/// (f(x), J). m is discovered by a first forward pass along e_0; if n <= m the
/// remaining columns follow in forward mode, otherwise the rows come from
/// reverse sweeps. The value returned is always that of the first pass.
template <VectorToVectorFn F>
std::pair<ADVector, ADMatrix> jacobianPrime(F&& f, const ADVector& x) {
  const std::size_t n = x.size();
  if (n == 0) return jacobianForwardPrime(f, x);
  auto [fx, col] = detail::forwardColumn(f, x, 0);
  if (n <= fx.size()) return detail::forwardJacobianFrom(f, x, std::move(fx), std::move(col));
  auto [fxr, j] = jacobianReversePrime(f, x);
  detail::requireOutputLength("jacobian", fx.size(), fxr.size());
  return {std::move(fx), std::move(j)};
}
template <VectorToVectorFn F>
ADMatrix jacobian(F&& f, const ADVector& x) {
  return jacobianPrime(f, x).second;
}
template <VectorToVectorFn F>
std::pair<ADVector, ADMatrix> jacobianTPrime(F&& f, const ADVector& x) {
  auto [fx, j] = jacobianPrime(f, x);
  return {std::move(fx), transpose(j)};
}
template <VectorToVectorFn F>
ADMatrix jacobianT(F&& f, const ADVector& x) {
  return transpose(jacobianPrime(f, x).second);
}

namespace detail {
inline void requireDimension(const char* what, std::size_t expected, std::size_t got, const char* which) {
  if (expected != got)
    throw DimensionError(std::string(what) + ": " + which + " dimension must be " + std::to_string(expected) +
                         ", got " + std::to_string(got));
}

inline ADVector curlOf(const ADMatrix& j) {
  return ADVector{j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

inline ADScalar traceOf(const ADMatrix& j) {
  ADScalar t = 0.0;
  for (std::size_t i = 0; i < j.rows(); ++i) t = t + j(i, i);
  return t;
}
}  // namespace detail

/// (f(x), curl f(x), div f(x)) from one forward-mode Jacobian. R^3 -> R^3 only.
template <VectorToVectorFn F>
std::tuple<ADVector, ADVector, ADScalar> curldivPrime(F&& f, const ADVector& x) {
  detail::requireDimension("curldiv", 3, x.size(), "input");
  auto [fx, j] = jacobianForwardPrime(f, x);
  detail::requireDimension("curldiv", 3, fx.size(), "output");
  return {std::move(fx), detail::curlOf(j), detail::traceOf(j)};
}
template <VectorToVectorFn F>
std::pair<ADVector, ADScalar> curldiv(F&& f, const ADVector& x) {
  auto [fx, c, d] = curldivPrime(f, x);
  return {std::move(c), d};
}
template <VectorToVectorFn F>
std::pair<ADVector, ADVector> curlPrime(F&& f, const ADVector& x) {
  auto [fx, c, d] = curldivPrime(f, x);
  return {std::move(fx), std::move(c)};
}
template <VectorToVectorFn F>
ADVector curl(F&& f, const ADVector& x) {
  return std::get<1>(curldivPrime(f, x));
}

/// (f(x), div f(x)) as the trace of the forward-mode Jacobian; requires n = m.
template <VectorToVectorFn F>
std::pair<ADVector, ADScalar> divPrime(F&& f, const ADVector& x) {
  auto [fx, j] = jacobianForwardPrime(f, x);
  detail::requireDimension("div", x.size(), fx.size(), "output");
  return {std::move(fx), detail::traceOf(j)};
}
template <VectorToVectorFn F>
ADScalar div(F&& f, const ADVector& x) {
  return divPrime(f, x).second;
}

// ===========================================================================
// Plain overloads: real inputs, real outputs.

template <ScalarFn F>
std::pair<double, double> diffPrime(F&& f, double x) {
  const auto [v, d] = diffPrime(f, ADScalar(x));
  return {v.value(), d.value()};
}
template <ScalarFn F>
double diff(F&& f, double x) {
  return diff(f, ADScalar(x)).value();
}
template <ScalarFn F>
std::tuple<double, double, double> diff2PrimePrime(F&& f, double x) {
  const auto [v, d1, d2] = diff2PrimePrime(f, ADScalar(x));
  return {v.value(), d1.value(), d2.value()};
}
template <ScalarFn F>
std::pair<double, double> diff2Prime(F&& f, double x) {
  const auto [v, d2] = diff2Prime(f, ADScalar(x));
  return {v.value(), d2.value()};
}
template <ScalarFn F>
double diff2(F&& f, double x) {
  return diff2(f, ADScalar(x)).value();
}
template <ScalarFn F>
std::pair<double, double> diffnPrime(std::size_t n, F&& f, double x) {
  const auto [v, d] = diffnPrime(n, f, ADScalar(x));
  return {v.value(), d.value()};
}
template <ScalarFn F>
double diffn(std::size_t n, F&& f, double x) {
  return diffn(n, f, ADScalar(x)).value();
}

template <VectorToScalarFn F>
std::pair<double, RealVector> gradPrime(F&& f, const RealVector& x) {
  const auto [v, g] = gradPrime(f, detail::lift(x));
  return {v.value(), g.values()};
}
template <VectorToScalarFn F>
RealVector grad(F&& f, const RealVector& x) {
  return grad(f, detail::lift(x)).values();
}
template <VectorToScalarFn F>
std::pair<double, double> gradvPrime(F&& f, const RealVector& x, const RealVector& v) {
  const auto [fx, d] = gradvPrime(f, detail::lift(x), detail::lift(v));
  return {fx.value(), d.value()};
}
template <VectorToScalarFn F>
double gradv(F&& f, const RealVector& x, const RealVector& v) {
  return gradv(f, detail::lift(x), detail::lift(v)).value();
}
template <VectorToScalarFn F>
std::tuple<double, RealVector, RealMatrix> gradhessianPrime(F&& f, const RealVector& x) {
  const auto [v, g, h] = gradhessianPrime(f, detail::lift(x));
  return {v.value(), g.values(), h.values()};
}
template <VectorToScalarFn F>
std::pair<RealVector, RealMatrix> gradhessian(F&& f, const RealVector& x) {
  const auto [g, h] = gradhessian(f, detail::lift(x));
  return {g.values(), h.values()};
}
template <VectorToScalarFn F>
std::pair<double, RealMatrix> hessianPrime(F&& f, const RealVector& x) {
  const auto [v, h] = hessianPrime(f, detail::lift(x));
  return {v.value(), h.values()};
}
template <VectorToScalarFn F>
RealMatrix hessian(F&& f, const RealVector& x) {
  return hessian(f, detail::lift(x)).values();
}
template <VectorToScalarFn F>
std::tuple<double, double, RealVector> gradhessianvPrime(F&& f, const RealVector& x, const RealVector& v) {
  const auto [fx, gv, hv] = gradhessianvPrime(f, detail::lift(x), detail::lift(v));
  return {fx.value(), gv.value(), hv.values()};
}
template <VectorToScalarFn F>
std::pair<double, RealVector> gradhessianv(F&& f, const RealVector& x, const RealVector& v) {
  const auto [gv, hv] = gradhessianv(f, detail::lift(x), detail::lift(v));
  return {gv.value(), hv.values()};
}
template <VectorToScalarFn F>
std::pair<double, RealVector> hessianvPrime(F&& f, const RealVector& x, const RealVector& v) {
  const auto [fx, hv] = hessianvPrime(f, detail::lift(x), detail::lift(v));
  return {fx.value(), hv.values()};
}
template <VectorToScalarFn F>
RealVector hessianv(F&& f, const RealVector& x, const RealVector& v) {
  return hessianv(f, detail::lift(x), detail::lift(v)).values();
}
template <VectorToScalarFn F>
std::pair<double, double> laplacianPrime(F&& f, const RealVector& x) {
  const auto [v, l] = laplacianPrime(f, detail::lift(x));
  return {v.value(), l.value()};
}
template <VectorToScalarFn F>
double laplacian(F&& f, const RealVector& x) {
  return laplacian(f, detail::lift(x)).value();
}

template <VectorToVectorFn F>
std::pair<RealVector, RealMatrix> jacobianPrime(F&& f, const RealVector& x) {
  const auto [fx, j] = jacobianPrime(f, detail::lift(x));
  return {fx.values(), j.values()};
}
template <VectorToVectorFn F>
RealMatrix jacobian(F&& f, const RealVector& x) {
  return jacobian(f, detail::lift(x)).values();
}
template <VectorToVectorFn F>
RealMatrix jacobianForward(F&& f, const RealVector& x) {
  return jacobianForward(f, detail::lift(x)).values();
}
template <VectorToVectorFn F>
RealMatrix jacobianReverse(F&& f, const RealVector& x) {
  return jacobianReverse(f, detail::lift(x)).values();
}
template <VectorToVectorFn F>
std::pair<RealVector, RealMatrix> jacobianTPrime(F&& f, const RealVector& x) {
  const auto [fx, jt] = jacobianTPrime(f, detail::lift(x));
  return {fx.values(), jt.values()};
}
template <VectorToVectorFn F>
RealMatrix jacobianT(F&& f, const RealVector& x) {
  return jacobianT(f, detail::lift(x)).values();
}
template <VectorToVectorFn F>
std::pair<RealVector, RealVector> jacobianvPrime(F&& f, const RealVector& x, const RealVector& v) {
  const auto [fx, jv] = jacobianvPrime(f, detail::lift(x), detail::lift(v));
  return {fx.values(), jv.values()};
}
template <VectorToVectorFn F>
RealVector jacobianv(F&& f, const RealVector& x, const RealVector& v) {
  return jacobianv(f, detail::lift(x), detail::lift(v)).values();
}
template <VectorToVectorFn F>
std::pair<RealVector, RealVector> jacobianTvPrime(F&& f, const RealVector& x, const RealVector& v) {
  const auto [fx, jtv] = jacobianTvPrime(f, detail::lift(x), detail::lift(v));
  return {fx.values(), jtv.values()};
}
template <VectorToVectorFn F>
RealVector jacobianTv(F&& f, const RealVector& x, const RealVector& v) {
  return jacobianTv(f, detail::lift(x), detail::lift(v)).values();
}
template <VectorToVectorFn F>
std::pair<RealVector, Pullback> jacobianTvPrimePrime(F&& f, const RealVector& x) {
  auto [fx, pullback] = jacobianTvPrimePrime(f, detail::lift(x));
  return {fx.values(), std::move(pullback)};
}
template <VectorToVectorFn F>
std::tuple<RealVector, RealVector, double> curldivPrime(F&& f, const RealVector& x) {
  const auto [fx, c, d] = curldivPrime(f, detail::lift(x));
  return {fx.values(), c.values(), d.value()};
}
template <VectorToVectorFn F>
std::pair<RealVector, double> curldiv(F&& f, const RealVector& x) {
  const auto [c, d] = curldiv(f, detail::lift(x));
  return {c.values(), d.value()};
}
template <VectorToVectorFn F>
std::pair<RealVector, RealVector> curlPrime(F&& f, const RealVector& x) {
  const auto [fx, c] = curlPrime(f, detail::lift(x));
  return {fx.values(), c.values()};
}
template <VectorToVectorFn F>
RealVector curl(F&& f, const RealVector& x) {
  return curl(f, detail::lift(x)).values();
}
template <VectorToVectorFn F>
std::pair<RealVector, double> divPrime(F&& f, const RealVector& x) {
  const auto [fx, d] = divPrime(f, detail::lift(x));
  return {fx.values(), d.value()};
}
template <VectorToVectorFn F>
double div(F&& f, const RealVector& x) {
  return div(f, detail::lift(x)).value();
}

}  // namespace ad
