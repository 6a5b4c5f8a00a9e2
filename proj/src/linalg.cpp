#include "ad/linalg.hpp"

#include <memory>
#include <stdexcept>
#include <string>

#include "ad/errors.hpp"
#include "ad/tape.hpp"

namespace ad {

using detail::Access;
using detail::Node;
using detail::ReverseNode;

namespace {

using Storage = std::shared_ptr<const std::vector<ADScalar>>;

Storage makeStorage(std::vector<ADScalar> elems) {
  return std::make_shared<const std::vector<ADScalar>>(std::move(elems));
}

const Storage& emptyStorage() {
  static const Storage empty = makeStorage({});
  return empty;
}

std::string shapeString(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

[[noreturn]] void throwShape(const char* what, std::size_t r1, std::size_t c1, std::size_t r2, std::size_t c2) {
  throw ShapeError(std::string(what) + ": incompatible shapes " + shapeString(r1, c1) + " and " +
                   shapeString(r2, c2));
}

// Youngest node among the elements, or null when all are constants.
Node* youngest(std::span<const ADScalar> xs, Node* best = nullptr) {
  for (const ADScalar& x : xs) {
    Node* n = Access::node(x);
    if (n && (!best || n->tag > best->tag)) best = n;
  }
  return best;
}

bool isZero(const ADScalar& x) { return x.isConstant() && x.value() == 0.0; }

// Splits each element at `tag`: primal, tangent (forward only) and the node
// when the element carries the tag.
struct Split {
  std::vector<ADScalar> primal;
  std::vector<ADScalar> tangent;
  std::vector<ReverseNode*> nodes;
  std::size_t tagged = 0;
  bool anyTangent = false;
};

Split split(std::span<const ADScalar> xs, Tag tag, Mode mode) {
  Split s;
  s.primal.reserve(xs.size());
  if (mode == Mode::Forward)
    s.tangent.reserve(xs.size());
  else
    s.nodes.reserve(xs.size());
  for (const ADScalar& x : xs) {
    Node* n = Access::node(x);
    const bool top = n && n->tag == tag;
    s.primal.push_back(top ? n->primal : x);
    if (mode == Mode::Forward) {
      s.tangent.push_back(top ? n->tangent : ADScalar(0.0));
      s.anyTangent = s.anyTangent || (top && !isZero(n->tangent));
    } else {
      s.nodes.push_back(top ? static_cast<ReverseNode*>(n) : nullptr);
    }
    s.tagged += top ? 1 : 0;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// ADVector

ADVector::ADVector() : data_(emptyStorage()) {}
ADVector::ADVector(std::vector<ADScalar> elems) : data_(makeStorage(std::move(elems))) {}
ADVector::ADVector(std::initializer_list<ADScalar> elems) : data_(makeStorage(std::vector<ADScalar>(elems))) {}
ADVector::ADVector(std::size_t n) : data_(makeStorage(std::vector<ADScalar>(n))) {}

ADVector ADVector::constant(std::span<const double> values) {
  return ADVector(std::vector<ADScalar>(values.begin(), values.end()));
}

const ADScalar& ADVector::operator[](std::size_t i) const {
  if (i >= data_->size())
    throw std::out_of_range("ADVector: index " + std::to_string(i) + " out of range for length " +
                            std::to_string(data_->size()));
  return (*data_)[i];
}

RealVector ADVector::values() const {
  RealVector out;
  out.reserve(size());
  for (const ADScalar& x : *data_) out.push_back(x.value());
  return out;
}

// ---------------------------------------------------------------------------
// ADMatrix

ADMatrix::ADMatrix() : data_(emptyStorage()) { detectConstant(); }

ADMatrix::ADMatrix(std::size_t rows, std::size_t cols, std::vector<ADScalar> elems)
    : rows_(rows), cols_(cols), data_(makeStorage(std::move(elems))) {
  if (data_->size() != rows * cols)
    throw ShapeError("ADMatrix: " + std::to_string(data_->size()) + " elements for a " +
                     shapeString(rows, cols) + " matrix");
  detectConstant();
}

ADMatrix::ADMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(makeStorage(std::vector<ADScalar>(rows * cols))) {
  detectConstant();
}

void ADMatrix::detectConstant() {
  std::vector<double> values;
  values.reserve(data_->size());
  for (const ADScalar& x : *data_) {
    if (!x.isConstant()) return;
    values.push_back(x.value());
  }
  constant_ = std::make_shared<const std::vector<double>>(std::move(values));
}

ADMatrix ADMatrix::constant(const RealMatrix& m) {
  return ADMatrix(m.rows(), m.cols(), std::vector<ADScalar>(m.data().begin(), m.data().end()));
}

const ADScalar& ADMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_)
    throw std::out_of_range("ADMatrix: index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") out of range for " + shapeString(rows_, cols_));
  return (*data_)[i * cols_ + j];
}

std::span<const ADScalar> ADMatrix::row(std::size_t i) const {
  if (i >= rows_) throw std::out_of_range("ADMatrix: row " + std::to_string(i) + " out of range");
  return std::span<const ADScalar>(*data_).subspan(i * cols_, cols_);
}

RealMatrix ADMatrix::values() const {
  RealMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*data_)[i * cols_ + j].value();
  return out;
}

// ---------------------------------------------------------------------------
// Vector operations

namespace {
template <class Op>
ADVector zipWith(const char* what, const ADVector& a, const ADVector& b, Op op) {
  detail::requireSameLength(what, a.size(), b.size());
  std::vector<ADScalar> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(op(a.elements()[i], b.elements()[i]));
  return ADVector(std::move(out));
}

template <class Op>
ADMatrix zipWith(const char* what, const ADMatrix& a, const ADMatrix& b, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throwShape(what, a.rows(), a.cols(), b.rows(), b.cols());
  std::vector<ADScalar> out;
  out.reserve(a.elements().size());
  for (std::size_t i = 0; i < a.elements().size(); ++i) out.push_back(op(a.elements()[i], b.elements()[i]));
  return ADMatrix(a.rows(), a.cols(), std::move(out));
}
}  // namespace

ADVector operator+(const ADVector& a, const ADVector& b) {
  return zipWith("vector add", a, b, [](const ADScalar& x, const ADScalar& y) { return x + y; });
}
ADVector operator-(const ADVector& a, const ADVector& b) {
  return zipWith("vector sub", a, b, [](const ADScalar& x, const ADScalar& y) { return x - y; });
}
ADVector operator-(const ADVector& a) {
  return map([](const ADScalar& x) { return -x; }, a);
}
ADVector operator*(const ADScalar& s, const ADVector& v) {
  return map([&s](const ADScalar& x) { return s * x; }, v);
}
ADVector operator*(const ADVector& v, const ADScalar& s) {
  return map([&s](const ADScalar& x) { return x * s; }, v);
}
ADVector operator/(const ADVector& v, const ADScalar& s) {
  return map([&s](const ADScalar& x) { return x / s; }, v);
}
ADVector hadamard(const ADVector& a, const ADVector& b) {
  return zipWith("hadamard", a, b, [](const ADScalar& x, const ADScalar& y) { return x * y; });
}

namespace {
// Reverse-mode dot when every operand's primal at `tag` is a plain constant:
// one pass, no intermediate vectors. Returns false (and records nothing) when
// some primal is itself a node.
bool dotReal(std::span<const ADScalar> a, std::span<const ADScalar> b, Tag tag, Tape& tape, ADScalar& result) {
  const std::size_t n = a.size();
  std::size_t arity = 0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Node* na = Access::node(a[i]);
    const Node* nb = Access::node(b[i]);
    if (na && !(na->tag == tag ? na->primal : a[i]).isConstant()) return false;
    if (nb && !(nb->tag == tag ? nb->primal : b[i]).isConstant()) return false;
    arity += (na && na->tag == tag) + (nb && nb->tag == tag);
    s += a[i].value() * b[i].value();
  }
  const auto rec = tape.newReverse(s, static_cast<std::uint32_t>(arity));
  ReverseNode** parents = rec.parents;
  ADScalar* partials = rec.partials;
  std::uint32_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Node* na = Access::node(a[i]);
    Node* nb = Access::node(b[i]);
    const bool ta = na && na->tag == tag;
    const bool tb = nb && nb->tag == tag;
    const double av = a[i].value();
    const double bv = b[i].value();
    if (ta) {
      parents[k] = static_cast<ReverseNode*>(na);
      std::construct_at(partials + k, bv);
      ++k;
    }
    if (tb) {
      parents[k] = static_cast<ReverseNode*>(nb);
      std::construct_at(partials + k, av);
      ++k;
    }
  }
  ReverseNode* r = rec.node;
  r->arity = k;
  r->realPartials = true;
  result = Access::make(s, r);
  return true;
}
}  // namespace

ADScalar dot(std::span<const ADScalar> a, std::span<const ADScalar> b) {
  detail::requireSameLength("dot", a.size(), b.size());
  Node* top = youngest(b, youngest(a));
  if (!top) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].value() * b[i].value();
    return s;
  }
  Tape& tape = *top->tape;
  const Mode mode = top->mode;
  if (mode == Mode::Reverse) {
    ADScalar result;
    if (dotReal(a, b, top->tag, tape, result)) return result;
  }
  Split sa = split(a, top->tag, mode);
  Split sb = split(b, top->tag, mode);
  ADScalar p = dot(sa.primal, sb.primal);

  if (mode == Mode::Forward) {
    ADScalar t = 0.0;
    if (sa.anyTangent) t = dot(sa.tangent, sb.primal);
    if (sb.anyTangent) t = t + dot(sa.primal, sb.tangent);
    return tape.newDual(p, t);
  }

  const std::size_t arity = sa.tagged + sb.tagged;
  const auto rec = tape.newReverse(p, static_cast<std::uint32_t>(arity));
  ReverseNode** parents = rec.parents;
  ADScalar* partials = rec.partials;
  std::size_t k = 0;
  bool realPartials = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sa.nodes[i]) {
      parents[k] = sa.nodes[i];
      std::construct_at(partials + k, sb.primal[i]);
      realPartials = realPartials && sb.primal[i].isConstant();
      ++k;
    }
    if (sb.nodes[i]) {
      parents[k] = sb.nodes[i];
      std::construct_at(partials + k, sa.primal[i]);
      realPartials = realPartials && sa.primal[i].isConstant();
      ++k;
    }
  }
  ReverseNode* r = rec.node;
  r->arity = static_cast<std::uint32_t>(arity);
  r->realPartials = realPartials;
  return Access::make(p.value(), r);
}

ADScalar dot(const ADVector& a, const ADVector& b) { return dot(a.elements(), b.elements()); }

namespace {
ADScalar sumSpan(std::span<const ADScalar> v) {
  Node* top = youngest(v);
  if (!top) {
    double s = 0.0;
    for (const ADScalar& x : v) s += x.value();
    return s;
  }
  Tape& tape = *top->tape;
  if (top->mode == Mode::Reverse) {
    const Tag tag = top->tag;
    bool realPrimals = true;
    std::size_t arity = 0;
    double s = 0.0;
    for (const ADScalar& x : v) {
      const Node* n = Access::node(x);
      if (n && !(n->tag == tag ? n->primal : x).isConstant()) {
        realPrimals = false;
        break;
      }
      arity += n && n->tag == tag;
      s += x.value();
    }
    if (realPrimals) {
      const auto rec = tape.newReverse(s, static_cast<std::uint32_t>(arity));
      ReverseNode** parents = rec.parents;
      ADScalar* partials = rec.partials;
      std::uint32_t k = 0;
      for (const ADScalar& x : v) {
        Node* n = Access::node(x);
        if (n && n->tag == tag) {
          parents[k] = static_cast<ReverseNode*>(n);
          std::construct_at(partials + k, 1.0);
          ++k;
        }
      }
      ReverseNode* r = rec.node;
      r->arity = k;
      r->realPartials = true;
      return Access::make(s, r);
    }
  }
  Split sv = split(v, top->tag, top->mode);
  ADScalar p = sumSpan(sv.primal);
  if (top->mode == Mode::Forward) return tape.newDual(p, sv.anyTangent ? sumSpan(sv.tangent) : ADScalar(0.0));

  const auto rec = tape.newReverse(p, static_cast<std::uint32_t>(sv.tagged));
  ReverseNode** parents = rec.parents;
  ADScalar* partials = rec.partials;
  std::size_t k = 0;
  for (ReverseNode* n : sv.nodes) {
    if (!n) continue;
    parents[k] = n;
    std::construct_at(partials + k, 1.0);
    ++k;
  }
  ReverseNode* r = rec.node;
  r->arity = static_cast<std::uint32_t>(sv.tagged);
  r->realPartials = true;
  return Access::make(p.value(), r);
}
}  // namespace

ADScalar sum(const ADVector& v) { return sumSpan(v.elements()); }

ADScalar l2norm(const ADVector& v) { return sqrt(dot(v, v)); }

// ---------------------------------------------------------------------------
// Matrix operations

ADMatrix operator+(const ADMatrix& a, const ADMatrix& b) {
  return zipWith("matrix add", a, b, [](const ADScalar& x, const ADScalar& y) { return x + y; });
}
ADMatrix operator-(const ADMatrix& a, const ADMatrix& b) {
  return zipWith("matrix sub", a, b, [](const ADScalar& x, const ADScalar& y) { return x - y; });
}
ADMatrix operator*(const ADScalar& s, const ADMatrix& m) {
  return map([&s](const ADScalar& x) { return s * x; }, m);
}
ADMatrix hadamard(const ADMatrix& a, const ADMatrix& b) {
  return zipWith("hadamard", a, b, [](const ADScalar& x, const ADScalar& y) { return x * y; });
}

namespace {
double rowDot(const double* row, std::span<const ADScalar> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += row[j] * x[j].value();
  return s;
}
}  // namespace

ADVector matVec(const ADMatrix& m, const ADVector& v) {
  if (m.cols() != v.size()) throwShape("matVec", m.rows(), m.cols(), v.size(), 1);
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  const std::span<const ADScalar> me = m.elements();
  const std::vector<double>* real = m.constantValues().get();
  std::vector<ADScalar> out;
  out.reserve(rows);

  Node* topM = real ? nullptr : youngest(me);
  Node* topV = youngest(v.elements());
  if (!topM && !topV) {
    for (std::size_t i = 0; i < rows; ++i) out.push_back(rowDot(real->data() + i * cols, v.elements()));
    return ADVector(std::move(out));
  }

  if (topV && (!topM || topV->tag > topM->tag)) {
    // M is constant with respect to v's tag: split v once for every row.
    Tape& tape = *topV->tape;
    Split sv = split(v.elements(), topV->tag, topV->mode);
    const bool realProduct = real && !youngest(sv.primal);
    const auto rowTimes = [&](std::size_t i, std::span<const ADScalar> x) -> ADScalar {
      if (realProduct) return rowDot(real->data() + i * cols, x);
      return dot(me.subspan(i * cols, cols), x);
    };
    if (topV->mode == Mode::Forward) {
      for (std::size_t i = 0; i < rows; ++i) {
        ADScalar p = rowTimes(i, sv.primal);
        out.push_back(tape.newDual(p, sv.anyTangent ? dot(me.subspan(i * cols, cols), sv.tangent) : ADScalar(0.0)));
      }
      return ADVector(std::move(out));
    }
    auto** parents = tape.allocArray<ReverseNode*>(cols);
    for (std::size_t j = 0; j < cols; ++j) parents[j] = sv.nodes[j];
    tape.retain(m.storage());
    const bool block = real && rows > 1;
    for (std::size_t i = 0; i < rows; ++i) {
      ADScalar p = rowTimes(i, sv.primal);
      ReverseNode* r;
      if (block && i + 1 == rows) {
        tape.retain(m.constantValues());
        detail::BlockEnd* end = tape.newBlockEnd(p);
        end->blockRows = static_cast<std::uint32_t>(rows);
        end->values = real->data();
        r = end;
      } else {
        r = tape.newReverse(p);
      }
      r->parents = parents;
      r->partials = me.data() + i * cols;
      r->arity = static_cast<std::uint32_t>(cols);
      r->realPartials = real != nullptr;
      out.push_back(Access::make(p.value(), r));
    }
    return ADVector(std::move(out));
  }

  for (std::size_t i = 0; i < rows; ++i) out.push_back(dot(me.subspan(i * cols, cols), v.elements()));
  return ADVector(std::move(out));
}

ADMatrix transpose(const ADMatrix& m) {
  std::vector<ADScalar> out;
  out.reserve(m.rows() * m.cols());
  const auto me = m.elements();
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(me[i * m.cols() + j]);
  return ADMatrix(m.cols(), m.rows(), std::move(out));
}

ADMatrix matMul(const ADMatrix& a, const ADMatrix& b) {
  if (a.cols() != b.rows()) throwShape("matMul", a.rows(), a.cols(), b.rows(), b.cols());
  const ADMatrix bt = transpose(b);
  std::vector<ADScalar> out;
  out.reserve(a.rows() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out.push_back(dot(a.row(i), bt.row(j)));
  return ADMatrix(a.rows(), b.cols(), std::move(out));
}

}  // namespace ad
