#include "rainbench/annotations.h"

#include <json.hpp>

#include "rainbench/error.h"

namespace rainbench {

using nlohmann::json;

std::string_view to_string(Weather w) {
  switch (w) {
    case Weather::kRainy: return "rainy";
    case Weather::kClear: return "clear";
    case Weather::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(SourceSplit s) {
  switch (s) {
    case SourceSplit::kTrain: return "train";
    case SourceSplit::kVal: return "val";
    case SourceSplit::kTest: return "test";
    case SourceSplit::kUnknown: return "unknown";
  }
  return "unknown";
}

Weather weather_from_string(std::string_view s) {
  if (s == "rainy") return Weather::kRainy;
  if (s == "clear") return Weather::kClear;
  return Weather::kOther;
}

std::vector<AnnotationRecord> parse_annotations(std::string_view text, SourceSplit split) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSyntaxError, "annotation parse failed at byte " + std::to_string(e.byte > 0 ? e.byte - 1 : 0) + ": " +
                                             e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::kSchemaError, "annotation document must be an array");

  std::vector<AnnotationRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    if (!entry.is_object()) {
      throw Error(ErrorKind::kSchemaError, "entry " + std::to_string(i) + " is not an object");
    }
    const auto name = entry.find("name");
    if (name == entry.end() || !name->is_string() || name->get_ref<const std::string&>().empty()) {
      throw Error(ErrorKind::kSchemaError, "entry " + std::to_string(i) + " has no name");
    }
    AnnotationRecord rec;
    rec.image_name = name->get<std::string>();
    rec.source_split = split;
    if (const auto attrs = entry.find("attributes"); attrs != entry.end() && attrs->is_object()) {
      if (const auto w = attrs->find("weather"); w != attrs->end() && w->is_string()) {
        rec.weather_raw = w->get<std::string>();
      }
    }
    rec.weather = weather_from_string(rec.weather_raw);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<AnnotationRecord> parse_annotations(std::span<const std::uint8_t> bytes, SourceSplit split) {
  return parse_annotations(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), split);
}

std::vector<AnnotationRecord> partition_by_weather(std::span<const AnnotationRecord> records, Weather label) {
  std::vector<AnnotationRecord> out;
  for (const auto& r : records) {
    if (r.weather == label) out.push_back(r);
  }
  return out;
}

WeatherCounts count_weather(std::span<const AnnotationRecord> records) {
  WeatherCounts c;
  for (const auto& r : records) {
    switch (r.weather) {
      case Weather::kRainy: ++c.rainy; break;
      case Weather::kClear: ++c.clear; break;
      case Weather::kOther: ++c.other; break;
    }
  }
  return c;
}

std::vector<AnnotationRecord> sample_subset(std::span<const AnnotationRecord> records, std::size_t n,
                                            SeededRng& rng) {
  if (n > records.size()) {
    throw Error(ErrorKind::kSampleTooLarge, "requested " + std::to_string(n) + " of " +
                                                std::to_string(records.size()) + " records");
  }
  // Shuffle indices rather than records to keep swaps cheap.
  std::vector<std::size_t> idx(records.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  partial_shuffle(idx, n, rng);
  std::vector<AnnotationRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(records[idx[i]]);
  return out;
}

std::vector<AnnotationRecord> sample_subset(std::span<const AnnotationRecord> records, std::size_t n,
                                            std::uint64_t seed) {
  SeededRng rng(seed);
  return sample_subset(records, n, rng);
}

}  // namespace rainbench
