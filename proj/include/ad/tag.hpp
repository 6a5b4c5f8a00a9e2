#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace ad {

/// Identifies one differentiation instantiation. Tags come from a process-wide
/// monotone counter, so a larger id always belongs to a younger (more deeply
/// nested) instantiation. Id 0 is reserved for "no tag" (plain constants).
class Tag {
 public:
  constexpr Tag() = default;
  constexpr explicit Tag(std::uint64_t id) : id_(id) {}

  [[nodiscard]] constexpr std::uint64_t id() const { return id_; }
  [[nodiscard]] constexpr bool isNone() const { return id_ == 0; }

  friend constexpr auto operator<=>(Tag, Tag) = default;

  friend std::ostream& operator<<(std::ostream& os, Tag t) { return os << "Tag(" << t.id_ << ")"; }

 private:
  std::uint64_t id_ = 0;
};

/// Returns a tag strictly greater than every tag handed out before. Thread-safe.
/// Throws std::overflow_error instead of wrapping once the counter is exhausted.
Tag freshTag();

namespace detail {
// Test hook: positions the counter so the next freshTag() returns value + 1.
void setTagCounterForTesting(std::uint64_t value);
}  // namespace detail

}  // namespace ad
