#include "rainbench/dct.h"

#include <cmath>
#include <numbers>

namespace rainbench {

namespace {

// basis[u][x] = a(u) cos((2x + 1) u pi / 16), a(0) = sqrt(1/8), a(u>0) = 1/2.
struct Basis {
  double m[8][8];

  Basis() {
    for (int u = 0; u < 8; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
      for (int x = 0; x < 8; ++x) m[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
  }
};

const Basis& basis() {
  static const Basis b;
  return b;
}

}  // namespace

DctBlock dct8x8(std::span<const double, 64> block) {
  const auto& c = basis().m;
  double rows[64];
  // Transform each row, then each column.
  for (int y = 0; y < 8; ++y) {
    for (int l = 0; l < 8; ++l) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += c[l][x] * block[y * 8 + x];
      rows[y * 8 + l] = s;
    }
  }
  DctBlock out;
  for (int l = 0; l < 8; ++l) {
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += c[k][y] * rows[y * 8 + l];
      out.coefficients[k * 8 + l] = s;
    }
  }
  return out;
}

Block8x8 idct8x8(const DctBlock& dct) {
  const auto& c = basis().m;
  double cols[64];
  for (int l = 0; l < 8; ++l) {
    for (int y = 0; y < 8; ++y) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += c[k][y] * dct.coefficients[k * 8 + l];
      cols[y * 8 + l] = s;
    }
  }
  Block8x8 out{};
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int l = 0; l < 8; ++l) s += c[l][x] * cols[y * 8 + l];
      out[y * 8 + x] = s;
    }
  }
  return out;
}

}  // namespace rainbench
