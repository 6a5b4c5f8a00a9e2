#include <cmath>
#include <memory>

#include "ad/scalar.hpp"
#include "ad/tape.hpp"

namespace ad::detail {
namespace {

bool isZero(const ADScalar& x) { return x.isConstant() && x.value() == 0.0; }

// tangent * derivative, without allocating for the constant +-1 derivatives of
// add/sub/neg.
ADScalar scale(const ADScalar& tangent, const ADScalar& d) {
  if (d.isConstant()) {
    if (d.value() == 1.0) return tangent;
    if (d.value() == -1.0) return -tangent;
  }
  return tangent * d;
}

ADScalar finishReverse(ReverseNode* r) { return Access::make(r->primal.value(), r); }

// The rule is applied at the outermost (youngest) tag of x and recurses into the
// primal for the value and the local derivative.
template <class Rule>
ADScalar liftUnary(const ADScalar& x) {
  Node* n = Access::node(x);
  const ADScalar& xp = n->primal;
  ADScalar p = Rule::value(xp);
  if (n->mode == Mode::Forward) {
    if (isZero(n->tangent)) return p;
    return n->tape->newDual(p, scale(n->tangent, Rule::derivative(xp, p)));
  }
  const auto rec = n->tape->newReverse(p, 1);
  rec.parents[0] = static_cast<ReverseNode*>(n);
  std::construct_at(rec.partials, Rule::derivative(xp, p));
  rec.node->arity = 1;
  rec.node->realPartials = rec.partials[0].isConstant();
  return finishReverse(rec.node);
}

// Mixed tags: the operand with the younger tag is the outer one; the other is
// a constant with respect to it. Equal tags combine both tangents or parents.
template <class Rule>
ADScalar liftBinary(const ADScalar& a, const ADScalar& b) {
  Node* na = Access::node(a);
  Node* nb = Access::node(b);
  Node* top = !na ? nb : !nb ? na : (na->tag >= nb->tag ? na : nb);
  const bool aTop = na && na->tag == top->tag;
  const bool bTop = nb && nb->tag == top->tag;
  const ADScalar ap = aTop ? na->primal : a;
  const ADScalar bp = bTop ? nb->primal : b;
  ADScalar p = Rule::value(ap, bp);
  Tape& tape = *top->tape;

  if (top->mode == Mode::Forward) {
    ADScalar t;
    bool have = false;
    if (aTop && !isZero(na->tangent)) {
      t = scale(na->tangent, Rule::da(ap, bp, p));
      have = true;
    }
    if (bTop && !isZero(nb->tangent)) {
      ADScalar tb = scale(nb->tangent, Rule::db(ap, bp, p));
      t = have ? t + tb : tb;
      have = true;
    }
    return have ? tape.newDual(p, t) : p;
  }

  const auto rec = tape.newReverse(p, aTop && bTop ? 2 : 1);
  std::uint32_t k = 0;
  bool realPartials = true;
  if (aTop) {
    rec.parents[k] = static_cast<ReverseNode*>(na);
    std::construct_at(rec.partials + k, Rule::da(ap, bp, p));
    realPartials = rec.partials[k].isConstant();
    ++k;
  }
  if (bTop) {
    rec.parents[k] = static_cast<ReverseNode*>(nb);
    std::construct_at(rec.partials + k, Rule::db(ap, bp, p));
    realPartials = realPartials && rec.partials[k].isConstant();
    ++k;
  }
  rec.node->arity = k;
  rec.node->realPartials = realPartials;
  return finishReverse(rec.node);
}

struct Add {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return a + b; }
  static ADScalar da(const ADScalar&, const ADScalar&, const ADScalar&) { return 1.0; }
  static ADScalar db(const ADScalar&, const ADScalar&, const ADScalar&) { return 1.0; }
};
struct Sub {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return a - b; }
  static ADScalar da(const ADScalar&, const ADScalar&, const ADScalar&) { return 1.0; }
  static ADScalar db(const ADScalar&, const ADScalar&, const ADScalar&) { return -1.0; }
};
struct Mul {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return a * b; }
  static ADScalar da(const ADScalar&, const ADScalar& b, const ADScalar&) { return b; }
  static ADScalar db(const ADScalar& a, const ADScalar&, const ADScalar&) { return a; }
};
struct Div {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return a / b; }
  static ADScalar da(const ADScalar&, const ADScalar& b, const ADScalar&) { return 1.0 / b; }
  static ADScalar db(const ADScalar&, const ADScalar& b, const ADScalar& p) { return -p / b; }
};
struct Pow {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return pow(a, b); }
  static ADScalar da(const ADScalar& a, const ADScalar& b, const ADScalar&) { return b * pow(a, b - 1.0); }
  // d/db a^b = a^b log a; the a = 0, b > 0 limit is 0 rather than 0 * -inf.
  static ADScalar db(const ADScalar& a, const ADScalar& b, const ADScalar& p) {
    if (a.value() == 0.0 && b.value() > 0.0) return 0.0;
    return p * log(a);
  }
};
struct Atan2 {
  static ADScalar value(const ADScalar& a, const ADScalar& b) { return atan2(a, b); }
  static ADScalar da(const ADScalar& a, const ADScalar& b, const ADScalar&) { return b / (a * a + b * b); }
  static ADScalar db(const ADScalar& a, const ADScalar& b, const ADScalar&) { return -a / (a * a + b * b); }
};

struct Neg {
  static ADScalar value(const ADScalar& x) { return -x; }
  static ADScalar derivative(const ADScalar&, const ADScalar&) { return -1.0; }
};
struct Sqrt {
  static ADScalar value(const ADScalar& x) { return sqrt(x); }
  static ADScalar derivative(const ADScalar&, const ADScalar& p) { return 0.5 / p; }
};
struct Exp {
  static ADScalar value(const ADScalar& x) { return exp(x); }
  static ADScalar derivative(const ADScalar&, const ADScalar& p) { return p; }
};
struct Log {
  static ADScalar value(const ADScalar& x) { return log(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return 1.0 / x; }
};
struct Sin {
  static ADScalar value(const ADScalar& x) { return sin(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return cos(x); }
};
struct Cos {
  static ADScalar value(const ADScalar& x) { return cos(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return -sin(x); }
};
struct Tan {
  static ADScalar value(const ADScalar& x) { return tan(x); }
  static ADScalar derivative(const ADScalar&, const ADScalar& p) { return 1.0 + p * p; }
};
struct Asin {
  static ADScalar value(const ADScalar& x) { return asin(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return 1.0 / sqrt(1.0 - x * x); }
};
struct Acos {
  static ADScalar value(const ADScalar& x) { return acos(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return -1.0 / sqrt(1.0 - x * x); }
};
struct Atan {
  static ADScalar value(const ADScalar& x) { return atan(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return 1.0 / (1.0 + x * x); }
};
struct Sinh {
  static ADScalar value(const ADScalar& x) { return sinh(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return cosh(x); }
};
struct Cosh {
  static ADScalar value(const ADScalar& x) { return cosh(x); }
  static ADScalar derivative(const ADScalar& x, const ADScalar&) { return sinh(x); }
};
struct Tanh {
  static ADScalar value(const ADScalar& x) { return tanh(x); }
  static ADScalar derivative(const ADScalar&, const ADScalar& p) { return 1.0 - p * p; }
};

}  // namespace

ADScalar addSlow(const ADScalar& a, const ADScalar& b) { return liftBinary<Add>(a, b); }
ADScalar subSlow(const ADScalar& a, const ADScalar& b) { return liftBinary<Sub>(a, b); }
ADScalar mulSlow(const ADScalar& a, const ADScalar& b) { return liftBinary<Mul>(a, b); }
ADScalar divSlow(const ADScalar& a, const ADScalar& b) { return liftBinary<Div>(a, b); }
ADScalar powSlow(const ADScalar& a, const ADScalar& b) { return liftBinary<Pow>(a, b); }
ADScalar atan2Slow(const ADScalar& a, const ADScalar& b) { return liftBinary<Atan2>(a, b); }

ADScalar negSlow(const ADScalar& x) { return liftUnary<Neg>(x); }
ADScalar sqrtSlow(const ADScalar& x) { return liftUnary<Sqrt>(x); }
ADScalar expSlow(const ADScalar& x) { return liftUnary<Exp>(x); }
ADScalar logSlow(const ADScalar& x) { return liftUnary<Log>(x); }
ADScalar sinSlow(const ADScalar& x) { return liftUnary<Sin>(x); }
ADScalar cosSlow(const ADScalar& x) { return liftUnary<Cos>(x); }
ADScalar tanSlow(const ADScalar& x) { return liftUnary<Tan>(x); }
ADScalar asinSlow(const ADScalar& x) { return liftUnary<Asin>(x); }
ADScalar acosSlow(const ADScalar& x) { return liftUnary<Acos>(x); }
ADScalar atanSlow(const ADScalar& x) { return liftUnary<Atan>(x); }
ADScalar sinhSlow(const ADScalar& x) { return liftUnary<Sinh>(x); }
ADScalar coshSlow(const ADScalar& x) { return liftUnary<Cosh>(x); }
ADScalar tanhSlow(const ADScalar& x) { return liftUnary<Tanh>(x); }

// |x| is x or -x away from zero; at zero the derivative is taken as 0, which
// makes the result a plain constant.
ADScalar absSlow(const ADScalar& x) {
  if (x.value() > 0.0) return x;
  if (x.value() < 0.0) return -x;
  return std::abs(x.value());
}

}  // namespace ad::detail
