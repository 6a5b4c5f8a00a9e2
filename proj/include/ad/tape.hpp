#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <span>
#include <utility>
#include <vector>

#include "ad/scalar.hpp"
#include "ad/tag.hpp"

namespace ad {

/// Owns every node of one differentiation instantiation.
///
/// A tape is created with a fresh tag and a mode. Forward tapes hold dual
/// nodes; reverse tapes hold the trace: reverse nodes in creation order, which is
/// a topological order of the recorded computation. Nodes are bump-allocated and
/// never move, so handles stay valid for the life of the tape.
///
/// Node creation and sweeps on one tape must not run concurrently. Distinct
/// tapes are independent.
class Tape {
 public:
  static std::shared_ptr<Tape> create(Mode mode);

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  ~Tape();

  [[nodiscard]] Tag tag() const { return tag_; }
  [[nodiscard]] Mode mode() const { return mode_; }

  /// Seeds a dual number. Forward tapes only; primal and tangent must carry
  /// older tags.
  ADScalar dual(const ADScalar& primal, const ADScalar& tangent);

  /// Creates a reverse leaf with no parents and a zero adjoint. Reverse tapes only.
  ADScalar leaf(const ADScalar& primal);

  /// Backward sweep seeded with one adjoint per output. Outputs that do not carry
  /// this tape's tag contribute nothing. Adjoints of all earlier sweeps are
  /// discarded (lazily, through the sweep epoch).
  void sweep(std::span<const std::pair<ADScalar, ADScalar>> seeds);
  void sweep(const ADScalar& root, const ADScalar& seed);

  /// Adjoint accumulated in x by the latest sweep; zero when x is not a node of
  /// this tape or was not reached.
  [[nodiscard]] ADScalar adjoint(const ADScalar& x) const;

  [[nodiscard]] ADScalar primalOf(const ADScalar& x) const { return primalAt(x, tag_); }
  [[nodiscard]] ADScalar tangentOf(const ADScalar& x) const { return tangentAt(x, tag_); }

  /// Keeps shared storage alive for as long as the tape (nodes may point into it).
  void retain(std::shared_ptr<const void> storage) { retained_.push_back(std::move(storage)); }

  [[nodiscard]] std::size_t reverseNodeCount() const { return order_.size(); }
  [[nodiscard]] std::uint64_t sweepEpoch() const { return epoch_; }

  /// Hash over the adjoint state of every reverse node. Used to show that other
  /// instantiations leave this one untouched.
  [[nodiscard]] std::uint64_t stateChecksum() const;

  // Node construction used by the lifted operations. No nesting checks.
  struct ReverseRecord {
    detail::ReverseNode* node;
    detail::ReverseNode** parents;  // room for `capacity` entries, owned by the node
    ADScalar* partials;             // likewise; entries must be constructed by the caller
  };
  ADScalar newDual(const ADScalar& primal, const ADScalar& tangent);
  /// A node without parent storage (leaves, or parents shared with other nodes).
  detail::ReverseNode* newReverse(const ADScalar& primal) {
    return pushReverse<detail::ReverseNode>(allocate(sizeof(detail::ReverseNode)), primal);
  }
  /// A node with trailing storage for up to `capacity` parents; arity starts at 0.
  ReverseRecord newReverse(const ADScalar& primal, std::uint32_t capacity) {
    static_assert(sizeof(detail::ReverseNode) % alignof(ADScalar) == 0);
    static_assert(sizeof(ADScalar) % alignof(detail::ReverseNode*) == 0);
    constexpr std::size_t head = sizeof(detail::ReverseNode);
    auto* base = static_cast<std::byte*>(allocate(head + capacity * (sizeof(ADScalar) + sizeof(detail::ReverseNode*))));
    detail::ReverseNode* n = pushReverse<detail::ReverseNode>(base, primal);
    auto* partials = reinterpret_cast<ADScalar*>(base + head);
    auto* parents = reinterpret_cast<detail::ReverseNode**>(base + head + capacity * sizeof(ADScalar));
    n->partials = partials;
    n->parents = parents;
    return {n, parents, partials};
  }
  detail::BlockEnd* newBlockEnd(const ADScalar& primal) {
    return pushReverse<detail::BlockEnd>(allocate(sizeof(detail::BlockEnd)), primal);
  }
  template <class T>
  T* allocArray(std::size_t n) {
    static_assert(alignof(T) <= kAlign);
    return static_cast<T*>(allocate(n * sizeof(T)));
  }

 private:
  Tape(Tag tag, Mode mode) : tag_(tag), mode_(mode) {
    if (mode == Mode::Reverse) order_.reserve(256);
  }
  static constexpr std::size_t kAlign = 8;

  // Every block is kAlign-aligned: sizes are rounded up to a multiple of it.
  void* allocate(std::size_t bytes) {
    bytes = (bytes + kAlign - 1) & ~(kAlign - 1);
    if (bytes > remaining_) [[unlikely]]
      return allocateFromNewChunk(bytes);
    void* out = cursor_;
    cursor_ += bytes;
    remaining_ -= bytes;
    return out;
  }
  void* allocateFromNewChunk(std::size_t bytes);
  template <class NodeT>
  NodeT* pushReverse(void* memory, const ADScalar& primal) {
    static_assert(alignof(NodeT) <= kAlign);
    if (order_.size() >= kMaxTrace) [[unlikely]]
      throwTraceTooLong();
    auto* n = new (memory) NodeT;
    n->tape = this;
    n->tag = tag_;
    n->mode = Mode::Reverse;
    n->primal = primal;
    n->seq = static_cast<std::uint32_t>(order_.size());
    order_.push_back(n);
    return n;
  }
  [[noreturn]] static void throwTraceTooLong();
  static constexpr std::size_t kMaxTrace = 0xffffffffu;
  void accumulate(detail::ReverseNode* node, const ADScalar& contribution);
  void accumulateReal(detail::ReverseNode* node, double contribution);
  void propagate(detail::ReverseNode* node);
  void propagateNested(detail::ReverseNode* node);
  void propagateBlock(std::size_t last);

  Tag tag_;
  Mode mode_;
  std::vector<std::unique_ptr<std::byte[]>> chunks_;
  std::byte* cursor_ = nullptr;
  std::size_t remaining_ = 0;
  std::size_t nextChunk_ = 16384;
  std::vector<detail::ReverseNode*> order_;
  std::uint64_t epoch_ = 0;
  bool sweeping_ = false;
  std::vector<std::shared_ptr<const void>> retained_;
  std::vector<double> scratch_;
};

/// Leaf reverse nodes for each input, in order. Leaves are distinct nodes even
/// when their values coincide.
std::vector<ADScalar> makeReverseInputs(Tape& tape, std::span<const ADScalar> xs);

/// Sweeps the trace that `root` belongs to with the given seed. `root` must be a
/// reverse node.
void reverseSweep(const ADScalar& root, const ADScalar& seed);

/// Adjoint of a reverse node after the latest sweep of its tape; zero for
/// anything that is not a reverse node.
ADScalar adjoint(const ADScalar& x);

}  // namespace ad
