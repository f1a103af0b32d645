#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rainbench/dataset.h"
#include "rainbench/image.h"
#include "rainbench/metrics.h"

namespace rainbench {

inline constexpr std::string_view kBaselineLabel = "Rain image";

struct ModelOutputSet {
  std::string model_name;
  // Holds one `<pair_id>.{png,jpg,jpeg}` per test pair.
  std::filesystem::path output_dir;
};

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1)
  std::optional<double> gain;  // empty on the baseline row

  friend bool operator==(const MetricStats&, const MetricStats&) = default;
};

struct BenchmarkRow {
  std::string label;
  MetricStats ssim;
  MetricStats psnr_hvs_m;

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

// Model rows in request order, baseline row last.
struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;
  std::string baseline_label{kBaselineLabel};
  std::size_t n = 0;

  friend bool operator==(const BenchmarkTable&, const BenchmarkTable&) = default;
};

struct ScoreRecord {
  std::string pair_id;
  std::string row_label;
  double ssim = 0.0;
  double psnr_hvs_m = 0.0;
  double gain_ssim = 0.0;
  double gain_psnr_hvs_m = 0.0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct BenchmarkResult {
  BenchmarkTable table;
  // Sorted by pair_id; per pair the baseline comes first, then models.
  std::vector<ScoreRecord> records;
};

/// Scores `candidate` against `clean` (the reference) on luma planes.
QualityScore score_pair(const ImageBuffer& clean, const ImageBuffer& candidate);

std::filesystem::path resolve_model_output(const ModelOutputSet& model, const std::string& pair_id);

/// Scores the manifest's test split: clean vs rain as the baseline and
/// clean vs each model's output. Every model must cover every test pair.
BenchmarkResult run_benchmark(const DatasetManifest& manifest, std::span<const ModelOutputSet> models,
                              const std::filesystem::path& base_dir, unsigned threads = 0);

/// Aggregates per-pair records into a table. `model_order` fixes row order;
/// records labelled kBaselineLabel form the baseline.
BenchmarkTable tabulate(std::span<const ScoreRecord> records, std::span<const std::string> model_order);

/// Writes `<out_dir>/<pair_id>.png` strips [norain | rain | model...] and
/// `<out_dir>/<pair_id>.json` captions with S/P values and gains.
void annotate_gallery(const DatasetManifest& manifest, std::span<const ModelOutputSet> models,
                      std::span<const ScoreRecord> records, const std::filesystem::path& base_dir,
                      const std::filesystem::path& out_dir, unsigned threads = 0);

}  // namespace rainbench
