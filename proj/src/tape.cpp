#include "ad/tape.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <new>
#include <string>

#include "ad/errors.hpp"

namespace ad {

using detail::Access;
using detail::Node;
using detail::ReverseNode;

namespace {
constexpr std::size_t kMaxChunk = std::size_t{1} << 20;

[[noreturn]] void throwYoungerTag(Tag have, Tag resolving) {
  throw ContractError("value carries " + std::to_string(have.id()) +
                      ", younger than the instantiation being resolved (" +
                      std::to_string(resolving.id()) + "); a tagged value escaped its scope");
}

bool isStructuralZero(const ADScalar& x) { return x.isConstant() && x.value() == 0.0; }

// acc += M^T c for row-major M (rows x cols), four rows per pass over acc.
void addTransposedProduct(double* __restrict acc, const double* __restrict m, const double* __restrict c,
                          std::size_t rows, std::size_t cols) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const double c0 = c[i], c1 = c[i + 1], c2 = c[i + 2], c3 = c[i + 3];
    const double* r0 = m + i * cols;
    const double* r1 = r0 + cols;
    const double* r2 = r1 + cols;
    const double* r3 = r2 + cols;
    for (std::size_t j = 0; j < cols; ++j) acc[j] += c0 * r0[j] + c1 * r1[j] + c2 * r2[j] + c3 * r3[j];
  }
  for (; i < rows; ++i) {
    const double ci = c[i];
    const double* r = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc[j] += ci * r[j];
  }
}
}  // namespace

ADScalar primal(const ADScalar& x) {
  const Node* n = Access::node(x);
  return n ? n->primal : x;
}

ADScalar primalAt(const ADScalar& x, Tag tag) {
  const Node* n = Access::node(x);
  if (!n || n->tag < tag) return x;
  if (n->tag == tag) return n->primal;
  throwYoungerTag(n->tag, tag);
}

ADScalar tangentAt(const ADScalar& x, Tag tag) {
  const Node* n = Access::node(x);
  if (!n || n->tag < tag) return 0.0;
  if (n->tag > tag) throwYoungerTag(n->tag, tag);
  if (n->mode != Mode::Forward) throw ContractError("tangentAt: tag belongs to a reverse instantiation");
  return n->tangent;
}

std::ostream& operator<<(std::ostream& os, const ADScalar& x) { return os << x.value(); }

std::shared_ptr<Tape> Tape::create(Mode mode) {
  return std::shared_ptr<Tape>(new Tape(freshTag(), mode));
}

Tape::~Tape() = default;

void* Tape::allocateFromNewChunk(std::size_t bytes) {
  const std::size_t size = std::max(nextChunk_, bytes);
  chunks_.emplace_back(new std::byte[size]);
  cursor_ = chunks_.back().get();
  remaining_ = size;
  nextChunk_ = std::min(nextChunk_ * 2, kMaxChunk);
  void* out = cursor_;
  cursor_ += bytes;
  remaining_ -= bytes;
  return out;
}

void Tape::throwTraceTooLong() { throw std::length_error("ad::Tape: trace too long"); }

ADScalar Tape::newDual(const ADScalar& primal, const ADScalar& tangent) {
  if (isStructuralZero(tangent)) return primal;
  auto* n = new (allocate(sizeof(Node))) Node{this, tag_, Mode::Forward, primal, tangent};
  return Access::make(primal.value(), n);
}

ADScalar Tape::dual(const ADScalar& primal, const ADScalar& tangent) {
  if (mode_ != Mode::Forward) throw ContractError("Tape::dual on a reverse tape");
  if (primal.tag() >= tag_ || tangent.tag() >= tag_)
    throw ContractError("Tape::dual: primal and tangent must carry older tags");
  auto* n = new (allocate(sizeof(Node))) Node{this, tag_, Mode::Forward, primal, tangent};
  return Access::make(primal.value(), n);
}

ADScalar Tape::leaf(const ADScalar& primal) {
  if (mode_ != Mode::Reverse) throw ContractError("Tape::leaf on a forward tape");
  if (primal.tag() >= tag_) throw ContractError("Tape::leaf: primal must carry an older tag");
  return Access::make(primal.value(), newReverse(primal));
}

inline void Tape::accumulate(ReverseNode* node, const ADScalar& contribution) {
  if (node->epoch != epoch_) {
    node->tangent = contribution;
    node->epoch = epoch_;
  } else {
    node->tangent = node->tangent + contribution;
  }
}

inline void Tape::accumulateReal(ReverseNode* node, double contribution) {
  if (node->epoch != epoch_) {
    node->tangent = contribution;
    node->epoch = epoch_;
  } else if (node->tangent.isConstant()) [[likely]] {
    Access::value(node->tangent) += contribution;
  } else {
    accumulate(node, contribution);
  }
}

// Adjoints or partials that are themselves nodes (forward-on-reverse nesting).
[[gnu::noinline]] void Tape::propagateNested(ReverseNode* n) {
  const ADScalar adj = n->tangent;
  for (std::uint32_t k = 0; k < n->arity; ++k) {
    ReverseNode* p = n->parents[k];
    if (!p) continue;
    const ADScalar& d = n->partials[k];
    if (adj.isConstant() && d.isConstant())
      accumulateReal(p, adj.value() * d.value());
    else
      accumulate(p, adj * d);
  }
}

inline void Tape::propagate(ReverseNode* n) {
  if (!n->realPartials || !n->tangent.isConstant()) [[unlikely]] {
    propagateNested(n);
    return;
  }
  const double a = n->tangent.value();
  if (a == 0.0) return;
  for (std::uint32_t k = 0; k < n->arity; ++k)
    if (ReverseNode* p = n->parents[k]) accumulateReal(p, a * n->partials[k].value());
}

// Rows last - blockRows + 1 .. last of one constant-matrix product. Every
// consumer of a row was recorded after the whole block, so all row adjoints are
// final here and the block reduces to one dense M^T a.
void Tape::propagateBlock(std::size_t last) {
  ReverseNode* const lastRow = order_[last];
  const std::size_t rows = lastRow->blockRows;
  const std::size_t cols = lastRow->arity;
  const std::size_t first = last + 1 - rows;

  bool realAdjoints = true;
  for (std::size_t i = first; i <= last; ++i) {
    const ReverseNode* r = order_[i];
    if (r->epoch == epoch_ && !r->tangent.isConstant()) {
      realAdjoints = false;
      break;
    }
  }
  if (!realAdjoints) {
    for (std::size_t i = last + 1; i-- > first;)
      if (order_[i]->epoch == epoch_) propagateNested(order_[i]);
    return;
  }

  scratch_.assign(cols + rows, 0.0);
  double* __restrict const acc = scratch_.data();
  double* __restrict const coef = acc + cols;
  bool any = false;
  for (std::size_t i = 0; i < rows; ++i) {
    const ReverseNode* r = order_[first + i];
    if (r->epoch == epoch_) coef[i] = r->tangent.value();
    any = any || coef[i] != 0.0;
  }
  if (!any) return;
  addTransposedProduct(acc, static_cast<const detail::BlockEnd*>(lastRow)->values, coef, rows, cols);
  ReverseNode* const* parents = lastRow->parents;
  for (std::size_t j = 0; j < cols; ++j)
    if (parents[j]) accumulateReal(parents[j], acc[j]);
}

void Tape::sweep(const ADScalar& root, const ADScalar& seed) {
  const std::pair<ADScalar, ADScalar> one[] = {{root, seed}};
  sweep(one);
}

void Tape::sweep(std::span<const std::pair<ADScalar, ADScalar>> seeds) {
  if (mode_ != Mode::Reverse) throw ContractError("Tape::sweep on a forward tape");
  if (sweeping_) throw ContractError("Tape::sweep: another sweep of this trace is in progress");
  sweeping_ = true;
  struct Reset {
    bool& flag;
    ~Reset() { flag = false; }
  } reset{sweeping_};

  ++epoch_;
  std::int64_t top = -1;
  for (const auto& [output, seed] : seeds) {
    if (seed.tag() >= tag_) throw ContractError("Tape::sweep: seed must carry an older tag");
    Node* n = Access::node(output);
    if (!n || n->tag < tag_) continue;
    if (n->tag > tag_) throwYoungerTag(n->tag, tag_);
    auto* r = static_cast<ReverseNode*>(n);
    accumulate(r, seed);
    top = std::max<std::int64_t>(top, r->seq);
  }

  for (std::int64_t i = top; i >= 0; --i) {
    ReverseNode* n = order_[static_cast<std::size_t>(i)];
    if (n->blockRows > 1) {
      propagateBlock(static_cast<std::size_t>(i));
      i -= static_cast<std::int64_t>(n->blockRows) - 1;
      continue;
    }
    if (n->epoch != epoch_ || n->arity == 0) continue;
    propagate(n);
  }
}

ADScalar Tape::adjoint(const ADScalar& x) const {
  const Node* n = Access::node(x);
  if (!n || n->tag != tag_ || n->mode != Mode::Reverse) return 0.0;
  const auto* r = static_cast<const ReverseNode*>(n);
  return r->epoch == epoch_ ? r->tangent : ADScalar(0.0);
}

std::uint64_t Tape::stateChecksum() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(epoch_);
  for (const ReverseNode* n : order_) {
    mix(n->epoch);
    mix(std::bit_cast<std::uint64_t>(n->tangent.value()));
  }
  return h;
}

std::vector<ADScalar> makeReverseInputs(Tape& tape, std::span<const ADScalar> xs) {
  if (tape.mode() != Mode::Reverse) throw ContractError("makeReverseInputs on a forward tape");
  for (const ADScalar& x : xs)
    if (x.tag() >= tape.tag()) throw ContractError("makeReverseInputs: inputs must carry older tags");
  std::vector<ADScalar> out;
  out.reserve(xs.size());
  for (const ADScalar& x : xs) out.push_back(Access::make(x.value(), tape.newReverse(x)));
  return out;
}

void reverseSweep(const ADScalar& root, const ADScalar& seed) {
  Node* n = Access::node(root);
  if (!n || n->mode != Mode::Reverse) throw ContractError("reverseSweep: root is not a reverse node");
  n->tape->sweep(root, seed);
}

ADScalar adjoint(const ADScalar& x) {
  const Node* n = Access::node(x);
  if (!n || n->mode != Mode::Reverse) return 0.0;
  return n->tape->adjoint(x);
}

}  // namespace ad
