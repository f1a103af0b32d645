#pragma once

#include <array>
#include <span>

namespace rainbench {

// 8x8 block, row-major: index = row * 8 + column.
using Block8x8 = std::array<double, 64>;

/// Orthonormal type-II 2-D DCT coefficients. coefficients[k * 8 + l] holds
/// vertical frequency k and horizontal frequency l; [0] is DC.
struct DctBlock {
  Block8x8 coefficients{};

  double at(int k, int l) const { return coefficients[k * 8 + l]; }
};

DctBlock dct8x8(std::span<const double, 64> block);
Block8x8 idct8x8(const DctBlock& dct);

}  // namespace rainbench
