#include "rainbench/rng.h"

#include <limits>

#include "rainbench/error.h"

namespace rainbench {

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::kInvalidArgument, "bound must be positive");
  // Largest multiple of bound representable; draws at or above it are redrawn.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace rainbench
