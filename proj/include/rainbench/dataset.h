#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rainbench/annotations.h"
#include "rainbench/image.h"

namespace rainbench {

enum class SplitRole { kTrain, kTest, kVal };

std::string_view to_string(SplitRole r);
SplitRole split_role_from_string(std::string_view s);

struct PairEntry {
  std::string pair_id;
  std::string clean_path;
  std::string rain_path;
  SplitRole split_role = SplitRole::kTrain;

  friend bool operator==(const PairEntry&, const PairEntry&) = default;
};

inline constexpr int kManifestFormatVersion = 1;

// Reproducibility record. Paths are stored as given; relative paths are
// resolved by consumers against a base directory of their choosing.
struct DatasetManifest {
  std::uint64_t seed = 0;
  std::vector<std::string> clean_entries;
  std::vector<std::string> rain_entries;
  std::vector<PairEntry> pairs;
  int format_version = kManifestFormatVersion;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;

  std::vector<PairEntry> pairs_with_role(SplitRole role) const;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t test = 0;
  std::size_t val = 0;
};

/// Samples `per_class` clear and `per_class` rainy records (clear first, one
/// generator seeded by `seed`) and records the image paths under `image_dir`.
DatasetManifest build_class_manifest(std::span<const AnnotationRecord> records, const std::string& image_dir,
                                     std::size_t per_class, std::uint64_t seed);

/// Pairs clean and rained images one-to-one by file stem; pair_id is the
/// stem. Output is sorted by pair_id with every role set to train.
std::vector<PairEntry> make_pairs(std::span<const std::string> clean_paths, std::span<const std::string> rain_paths);

/// Seeded role assignment with exact counts. Input order is preserved.
std::vector<PairEntry> assign_splits(std::span<const PairEntry> pairs, SplitCounts counts, std::uint64_t seed);

ImageBuffer merge_pair(const ImageBuffer& rain, const ImageBuffer& clean);

struct RainCleanPair {
  ImageBuffer rain;
  ImageBuffer clean;
};
RainCleanPair split_merged(const ImageBuffer& merged);

/// Canonical JSON: fixed key order, two-space indent, trailing newline.
std::string persist_manifest(const DatasetManifest& manifest);
DatasetManifest load_manifest(std::string_view text);

/// Writes `<out_root>/rain/<id>.png`, `<out_root>/norain/<id>.png` and
/// `<out_root>/merged/<id>.png` for every pair. Relative manifest paths are
/// resolved against `base_dir`.
void write_pair_layout(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                       const std::filesystem::path& out_root, unsigned threads = 0);

std::filesystem::path resolve_path(const std::filesystem::path& base_dir, const std::string& p);

}  // namespace rainbench
