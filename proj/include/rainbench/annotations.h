#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rainbench/rng.h"

namespace rainbench {

enum class Weather { kRainy, kClear, kOther };
enum class SourceSplit { kTrain, kVal, kTest, kUnknown };

std::string_view to_string(Weather w);
std::string_view to_string(SourceSplit s);

struct AnnotationRecord {
  std::string image_name;
  Weather weather = Weather::kOther;
  SourceSplit source_split = SourceSplit::kUnknown;
  // Raw attribute value, kept so `other` records can be reported.
  std::string weather_raw;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// Maps the BDD100K weather attribute; anything but "rainy"/"clear"
// (including a missing attribute) becomes kOther.
Weather weather_from_string(std::string_view s);

/// Parses a BDD100K-style label file: a JSON array of objects carrying a
/// `name` and an `attributes.weather` field. Record order follows the file.
/// Throws SyntaxError (with byte offset) or SchemaError (missing name).
std::vector<AnnotationRecord> parse_annotations(std::span<const std::uint8_t> bytes,
                                                SourceSplit split = SourceSplit::kUnknown);
std::vector<AnnotationRecord> parse_annotations(std::string_view text,
                                                SourceSplit split = SourceSplit::kUnknown);

std::vector<AnnotationRecord> partition_by_weather(std::span<const AnnotationRecord> records, Weather label);

struct WeatherCounts {
  std::size_t rainy = 0;
  std::size_t clear = 0;
  std::size_t other = 0;
};
WeatherCounts count_weather(std::span<const AnnotationRecord> records);

/// Uniform draw of `n` distinct records without replacement (partial
/// Fisher-Yates over SeededRng), returned in draw order.
std::vector<AnnotationRecord> sample_subset(std::span<const AnnotationRecord> records, std::size_t n,
                                            std::uint64_t seed);
std::vector<AnnotationRecord> sample_subset(std::span<const AnnotationRecord> records, std::size_t n,
                                            SeededRng& rng);

}  // namespace rainbench
