#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>

#include "ad/tag.hpp"

namespace ad {

enum class Mode : std::uint8_t { Forward, Reverse };

class Tape;

namespace detail {
struct Node;
struct ReverseNode;
struct Access;
}  // namespace detail

/// The differentiable number.
///
/// An ADScalar is either a plain constant or a handle to a node owned by the tape
/// of one differentiation instantiation. A forward node is a dual number
/// (primal, tangent); a reverse node records its parents and local partials and
/// accumulates an adjoint during a sweep. Primal, tangent and partials are
/// themselves ADScalars carrying strictly older tags, which is what lets
/// instantiations nest to any depth.
///
/// The handle is 16 bytes and trivially copyable. `value()` is the innermost
/// real primal, cached so that comparisons and branch decisions never walk the
/// nesting chain.
///
/// Nodes live as long as their tape. Values carrying a tag must not outlive the
/// differentiation call that created the tag; the functional API only ever
/// returns values with that tag stripped.
class ADScalar {
 public:
  constexpr ADScalar() = default;
  constexpr ADScalar(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] constexpr double value() const { return value_; }
  [[nodiscard]] constexpr bool isConstant() const { return node_ == nullptr; }
  [[nodiscard]] Tag tag() const;
  [[nodiscard]] bool isDual() const;
  [[nodiscard]] bool isReverse() const;

  ADScalar& operator+=(const ADScalar& rhs);
  ADScalar& operator-=(const ADScalar& rhs);
  ADScalar& operator*=(const ADScalar& rhs);
  ADScalar& operator/=(const ADScalar& rhs);

 private:
  friend struct detail::Access;
  constexpr ADScalar(double v, detail::Node* n) : value_(v), node_(n) {}

  double value_ = 0.0;
  detail::Node* node_ = nullptr;
};

namespace detail {

struct Node {
  Tape* tape;
  Tag tag;
  Mode mode;
  ADScalar primal;
  // Forward: the tangent. Reverse: the adjoint accumulator, valid only while
  // the owning ReverseNode's epoch matches the tape's.
  ADScalar tangent;
};

struct ReverseNode : Node {
  std::uint64_t epoch = 0;
  ReverseNode* const* parents = nullptr;  // null entries are constant w.r.t. this tag
  const ADScalar* partials = nullptr;
  std::uint32_t arity = 0;
  std::uint32_t seq = 0;  // creation index within the tape
  // Set on the last row of a constant-matrix product: this node and the
  // blockRows - 1 nodes before it in creation order are the rows of one M v.
  std::uint32_t blockRows = 0;
  bool realPartials = false;  // every partial is a plain constant
};

// Last row of a constant-matrix product block.
struct BlockEnd : ReverseNode {
  const double* values = nullptr;  // the block's matrix, blockRows x arity, row-major
};

struct Access {
  static Node* node(const ADScalar& x) { return x.node_; }
  static ADScalar make(double v, Node* n) { return ADScalar(v, n); }
  static double& value(ADScalar& x) { return x.value_; }
};

}  // namespace detail

inline Tag ADScalar::tag() const { return node_ ? node_->tag : Tag{}; }
inline bool ADScalar::isDual() const { return node_ && node_->mode == Mode::Forward; }
inline bool ADScalar::isReverse() const { return node_ && node_->mode == Mode::Reverse; }

/// Strips exactly one level: the primal of a dual or reverse node, or the
/// value itself for a constant.
ADScalar primal(const ADScalar& x);

/// Primal of x with respect to instantiation `tag`; x itself when it does not
/// carry that tag. Throws ContractError when x carries a younger tag.
ADScalar primalAt(const ADScalar& x, Tag tag);

/// Tangent of x with respect to forward instantiation `tag`; zero when x does
/// not carry that tag.
ADScalar tangentAt(const ADScalar& x, Tag tag);

std::ostream& operator<<(std::ostream& os, const ADScalar& x);

// ---------------------------------------------------------------------------
// Lifted elementary operations. Each takes an inline fast path when every
// operand is a constant.

namespace detail {
ADScalar addSlow(const ADScalar& a, const ADScalar& b);
ADScalar subSlow(const ADScalar& a, const ADScalar& b);
ADScalar mulSlow(const ADScalar& a, const ADScalar& b);
ADScalar divSlow(const ADScalar& a, const ADScalar& b);
ADScalar powSlow(const ADScalar& a, const ADScalar& b);
ADScalar atan2Slow(const ADScalar& a, const ADScalar& b);

ADScalar negSlow(const ADScalar& x);
ADScalar sqrtSlow(const ADScalar& x);
ADScalar expSlow(const ADScalar& x);
ADScalar logSlow(const ADScalar& x);
ADScalar sinSlow(const ADScalar& x);
ADScalar cosSlow(const ADScalar& x);
ADScalar tanSlow(const ADScalar& x);
ADScalar asinSlow(const ADScalar& x);
ADScalar acosSlow(const ADScalar& x);
ADScalar atanSlow(const ADScalar& x);
ADScalar sinhSlow(const ADScalar& x);
ADScalar coshSlow(const ADScalar& x);
ADScalar tanhSlow(const ADScalar& x);
ADScalar absSlow(const ADScalar& x);
}  // namespace detail

inline ADScalar operator+(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return a.value() + b.value();
  return detail::addSlow(a, b);
}
inline ADScalar operator-(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return a.value() - b.value();
  return detail::subSlow(a, b);
}
inline ADScalar operator*(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return a.value() * b.value();
  return detail::mulSlow(a, b);
}
inline ADScalar operator/(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return a.value() / b.value();
  return detail::divSlow(a, b);
}
inline ADScalar operator-(const ADScalar& x) {
  return x.isConstant() ? ADScalar(-x.value()) : detail::negSlow(x);
}
inline ADScalar operator+(const ADScalar& x) { return x; }

inline ADScalar& ADScalar::operator+=(const ADScalar& rhs) { return *this = *this + rhs; }
inline ADScalar& ADScalar::operator-=(const ADScalar& rhs) { return *this = *this - rhs; }
inline ADScalar& ADScalar::operator*=(const ADScalar& rhs) { return *this = *this * rhs; }
inline ADScalar& ADScalar::operator/=(const ADScalar& rhs) { return *this = *this / rhs; }

inline ADScalar pow(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return std::pow(a.value(), b.value());
  return detail::powSlow(a, b);
}
inline ADScalar atan2(const ADScalar& a, const ADScalar& b) {
  if (a.isConstant() && b.isConstant()) return std::atan2(a.value(), b.value());
  return detail::atan2Slow(a, b);
}
/// Ties (equal values) select the first argument, derivative included.
inline ADScalar min(const ADScalar& a, const ADScalar& b) { return b.value() < a.value() ? b : a; }
inline ADScalar max(const ADScalar& a, const ADScalar& b) { return b.value() > a.value() ? b : a; }

#define AD_LIFT_UNARY(name, stdfn)                                          \
  inline ADScalar name(const ADScalar& x) {                                 \
    return x.isConstant() ? ADScalar(stdfn(x.value())) : detail::name##Slow(x); \
  }
AD_LIFT_UNARY(sqrt, std::sqrt)
AD_LIFT_UNARY(exp, std::exp)
AD_LIFT_UNARY(log, std::log)
AD_LIFT_UNARY(sin, std::sin)
AD_LIFT_UNARY(cos, std::cos)
AD_LIFT_UNARY(tan, std::tan)
AD_LIFT_UNARY(asin, std::asin)
AD_LIFT_UNARY(acos, std::acos)
AD_LIFT_UNARY(atan, std::atan)
AD_LIFT_UNARY(sinh, std::sinh)
AD_LIFT_UNARY(cosh, std::cosh)
AD_LIFT_UNARY(tanh, std::tanh)
AD_LIFT_UNARY(abs, std::abs)
#undef AD_LIFT_UNARY

inline ADScalar neg(const ADScalar& x) { return -x; }

// Piecewise constant: the derivative is zero everywhere it exists and taken as
// zero at the jumps, so the result drops every tag.
inline ADScalar floor(const ADScalar& x) { return std::floor(x.value()); }
inline ADScalar ceil(const ADScalar& x) { return std::ceil(x.value()); }
inline ADScalar round(const ADScalar& x) { return std::round(x.value()); }

// Comparisons look at the innermost real value only.
inline bool operator==(const ADScalar& a, const ADScalar& b) { return a.value() == b.value(); }
inline auto operator<=>(const ADScalar& a, const ADScalar& b) { return a.value() <=> b.value(); }

}  // namespace ad
