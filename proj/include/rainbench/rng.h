#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace rainbench {

inline constexpr std::uint64_t kDefaultSeed = 20230501;

// Platform-independent generator. std::mt19937_64's output sequence is
// fixed by the standard; the bounded draw below is ours, because the
// standard distributions are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound) by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Partial Fisher-Yates: after the call, the first `n` elements are a
/// uniform sample without replacement, in draw order.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t n, SeededRng& rng) {
  for (std::size_t i = 0; i < n && i + 1 < items.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    using std::swap;
    swap(items[i], items[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& items, SeededRng& rng) {
  partial_shuffle(items, items.size(), rng);
}

}  // namespace rainbench
