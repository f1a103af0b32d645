#pragma once

#include <span>

namespace rainbench {

struct Summary {
  double mean = 0.0;
  // Sample standard deviation (n - 1 denominator); 0 for a single value.
  double std = 0.0;
  bool single_sample = false;
};

/// Two-pass mean and sample standard deviation. Throws EmptyInput.
Summary aggregate(std::span<const double> values);

/// Linear interpolation between order statistics:
/// h = (n - 1) p, q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double p);

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumber five_number(std::span<const double> values);

}  // namespace rainbench
