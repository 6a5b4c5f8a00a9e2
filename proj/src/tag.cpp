#include "ad/tag.hpp"

#include <atomic>
#include <limits>
#include <stdexcept>

namespace ad {
namespace {
std::atomic<std::uint64_t> g_tagCounter{0};
}

Tag freshTag() {
  std::uint64_t current = g_tagCounter.load(std::memory_order_relaxed);
  do {
    if (current == std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("ad::freshTag: tag counter exhausted");
  } while (!g_tagCounter.compare_exchange_weak(current, current + 1, std::memory_order_relaxed));
  return Tag(current + 1);
}

namespace detail {
void setTagCounterForTesting(std::uint64_t value) { g_tagCounter.store(value); }
}  // namespace detail

}  // namespace ad
