#pragma once

#include <array>
#include <cstdint>

namespace rainbench {

using Grid8x8 = std::array<std::array<double, 8>, 8>;

// Weights for PSNR-HVS / PSNR-HVS-M, indexed [vertical][horizontal]
// DCT frequency.
struct HvsTables {
  Grid8x8 csf_weights{};
  Grid8x8 masking_weights{};
  double masking_normalizer = 0.0;

  /// Values from Ponomarenko et al.'s reference psnrhvsm.m (2007).
  static const HvsTables& published();

  /// FNV-1a over every entry rounded to integer micro-units.
  std::uint64_t checksum() const;

  /// True when every entry is strictly positive.
  bool valid() const;
};

// Checksum of HvsTables::published(); a mismatch means the constants were edited.
inline constexpr std::uint64_t kPublishedHvsTablesChecksum = 0x6f426a7be4500186ULL;

}  // namespace rainbench
