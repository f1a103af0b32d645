#include "rainbench/stats.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rainbench/error.h"

namespace rainbench {

Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kEmptyInput, "aggregate of zero values");
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) {
    s.single_sample = true;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::kEmptyInput, "quantile of zero values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

FiveNumber five_number(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return {quantile_sorted(v, 0.0), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5), quantile_sorted(v, 0.75),
          quantile_sorted(v, 1.0)};
}

}  // namespace rainbench
