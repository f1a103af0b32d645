#include "rainbench/benchmark.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "rainbench/error.h"
#include "rainbench/file_io.h"
#include "rainbench/parallel.h"
#include "rainbench/stats.h"

namespace rainbench {

namespace fs = std::filesystem;

QualityScore score_pair(const ImageBuffer& clean, const ImageBuffer& candidate) {
  const ImageBuffer ref = to_luma(clean);
  const ImageBuffer test = to_luma(candidate);
  QualityScore q;
  q.ssim = ssim(ref, test);
  const HvsScores hvs = psnr_hvs_m(ref, test);
  q.psnr_hvs_m = hvs.psnr_hvs_m;
  q.psnr_hvs = hvs.psnr_hvs;
  q.mse = mse(ref, test);
  q.psnr = energy_to_db(q.mse);
  return q;
}

fs::path resolve_model_output(const ModelOutputSet& model, const std::string& pair_id) {
  std::vector<fs::path> hits;
  for (const char* ext : {".png", ".jpg", ".jpeg"}) {
    fs::path candidate = model.output_dir / (pair_id + ext);
    if (fs::is_regular_file(candidate)) hits.push_back(std::move(candidate));
  }
  if (hits.empty()) {
    throw Error(ErrorKind::kMissingOutput, model.model_name + ": " + pair_id);
  }
  if (hits.size() > 1) {
    throw Error(ErrorKind::kAmbiguousOutput, model.model_name + ": several files for " + pair_id);
  }
  return hits.front();
}

namespace {

struct PairScores {
  QualityScore baseline;
  std::vector<QualityScore> models;
};

void require_same_shape(const ImageBuffer& clean, const ImageBuffer& other, const std::string& pair_id,
                        std::string_view what) {
  if (clean.width() != other.width() || clean.height() != other.height()) {
    throw Error(ErrorKind::kDimensionMismatch, pair_id + ": " + std::string(what) + " is " +
                                                   std::to_string(other.width()) + "x" +
                                                   std::to_string(other.height()) + ", clean is " +
                                                   std::to_string(clean.width()) + "x" +
                                                   std::to_string(clean.height()));
  }
}

std::vector<PairEntry> sorted_test_pairs(const DatasetManifest& manifest) {
  auto test = manifest.pairs_with_role(SplitRole::kTest);
  std::sort(test.begin(), test.end(), [](const PairEntry& a, const PairEntry& b) { return a.pair_id < b.pair_id; });
  return test;
}

// Checks every model up front so one failure lists every missing id.
std::vector<std::vector<fs::path>> resolve_all_outputs(std::span<const ModelOutputSet> models,
                                                       std::span<const PairEntry> pairs) {
  std::vector<std::vector<fs::path>> out(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::string missing;
    for (const auto& p : pairs) {
      try {
        out[m].push_back(resolve_model_output(models[m], p.pair_id));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kMissingOutput) throw;
        missing += (missing.empty() ? "" : ",") + p.pair_id;
      }
    }
    if (!missing.empty()) throw Error(ErrorKind::kMissingOutput, models[m].model_name + ": " + missing);
  }
  return out;
}

}  // namespace

BenchmarkResult run_benchmark(const DatasetManifest& manifest, std::span<const ModelOutputSet> models,
                              const fs::path& base_dir, unsigned threads) {
  const auto pairs = sorted_test_pairs(manifest);
  if (pairs.empty()) throw Error(ErrorKind::kEmptyInput, "manifest has no test pairs");
  const auto outputs = resolve_all_outputs(models, pairs);

  std::vector<PairScores> scores(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const PairEntry& p = pairs[i];
    const ImageBuffer clean = load_image(resolve_path(base_dir, p.clean_path).string());
    const ImageBuffer rain = load_image(resolve_path(base_dir, p.rain_path).string());
    require_same_shape(clean, rain, p.pair_id, "rain image");
    scores[i].baseline = score_pair(clean, rain);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const ImageBuffer out = load_image(outputs[m][i].string());
      require_same_shape(clean, out, p.pair_id, models[m].model_name + " output");
      scores[i].models.push_back(score_pair(clean, out));
    }
  });

  BenchmarkResult result;
  std::vector<std::string> order;
  for (const auto& m : models) order.push_back(m.model_name);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const QualityScore& base = scores[i].baseline;
    result.records.push_back({pairs[i].pair_id, std::string(kBaselineLabel), base.ssim, base.psnr_hvs_m, 0.0, 0.0});
    for (std::size_t m = 0; m < models.size(); ++m) {
      const QualityScore& q = scores[i].models[m];
      result.records.push_back({pairs[i].pair_id, models[m].model_name, q.ssim, q.psnr_hvs_m, q.ssim - base.ssim,
                                q.psnr_hvs_m - base.psnr_hvs_m});
    }
  }
  result.table = tabulate(result.records, order);
  return result;
}

BenchmarkTable tabulate(std::span<const ScoreRecord> records, std::span<const std::string> model_order) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_label;
  for (const auto& r : records) {
    auto& [s, p] = by_label[r.row_label];
    s.push_back(r.ssim);
    p.push_back(r.psnr_hvs_m);
  }
  const auto base_it = by_label.find(std::string(kBaselineLabel));
  if (base_it == by_label.end()) throw Error(ErrorKind::kEmptyInput, "no baseline records");

  BenchmarkTable table;
  table.n = base_it->second.first.size();
  auto stats_of = [](const std::vector<double>& v) {
    const Summary s = aggregate(v);
    if (s.single_sample) std::fprintf(stderr, "warning: standard deviation of a single sample reported as 0\n");
    return MetricStats{s.mean, s.std, std::nullopt};
  };
  const MetricStats base_ssim = stats_of(base_it->second.first);
  const MetricStats base_hvs = stats_of(base_it->second.second);

  for (const auto& label : model_order) {
    const auto it = by_label.find(label);
    if (it == by_label.end() || it->second.first.size() != table.n) {
      throw Error(ErrorKind::kMissingOutput, label + ": record count differs from baseline");
    }
    BenchmarkRow row{label, stats_of(it->second.first), stats_of(it->second.second)};
    row.ssim.gain = row.ssim.mean - base_ssim.mean;
    row.psnr_hvs_m.gain = row.psnr_hvs_m.mean - base_hvs.mean;
    table.rows.push_back(std::move(row));
  }
  table.rows.push_back({std::string(kBaselineLabel), base_ssim, base_hvs});
  return table;
}

void annotate_gallery(const DatasetManifest& manifest, std::span<const ModelOutputSet> models,
                      std::span<const ScoreRecord> records, const fs::path& base_dir, const fs::path& out_dir,
                      unsigned threads) {
  const auto pairs = sorted_test_pairs(manifest);
  const auto outputs = resolve_all_outputs(models, pairs);
  std::map<std::pair<std::string, std::string>, const ScoreRecord*> lookup;
  for (const auto& r : records) lookup[{r.pair_id, r.row_label}] = &r;
  auto record_for = [&](const std::string& pair_id, const std::string& label) -> const ScoreRecord& {
    const auto it = lookup.find({pair_id, label});
    if (it == lookup.end()) throw Error(ErrorKind::kMissingOutput, "no score for " + label + " on " + pair_id);
    return *it->second;
  };
  fs::create_directories(out_dir);

  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const PairEntry& p = pairs[i];
    std::vector<ImageBuffer> panels;
    panels.push_back(load_image(resolve_path(base_dir, p.clean_path).string()));
    panels.push_back(load_image(resolve_path(base_dir, p.rain_path).string()));
    for (std::size_t m = 0; m < models.size(); ++m) panels.push_back(load_image(outputs[m][i].string()));

    const int w = panels.front().width();
    const int h = panels.front().height();
    bool any_rgb = false;
    for (const auto& img : panels) {
      require_same_shape(panels.front(), img, p.pair_id, "gallery panel");
      any_rgb = any_rgb || img.channels() == 3;
    }
    const int ch = any_rgb ? 3 : 1;
    const std::size_t panel_row = static_cast<std::size_t>(w) * ch;
    const std::size_t strip_row = panel_row * panels.size();
    std::vector<std::uint8_t> strip(strip_row * h);
    for (std::size_t k = 0; k < panels.size(); ++k) {
      const ImageBuffer img = any_rgb ? to_rgb(panels[k]) : panels[k];
      for (int y = 0; y < h; ++y) {
        std::copy_n(img.samples().data() + panel_row * y, panel_row, strip.data() + strip_row * y + panel_row * k);
      }
    }
    save_png(ImageBuffer(w * static_cast<int>(panels.size()), h, ch, std::move(strip)),
             (out_dir / (p.pair_id + ".png")).string());

    nlohmann::ordered_json doc;
    doc["pair_id"] = p.pair_id;
    doc["panel_width"] = w;
    doc["panel_height"] = h;
    doc["panels"] = nlohmann::ordered_json::array();
    doc["panels"].push_back({{"label", "norain"}});
    const ScoreRecord& base = record_for(p.pair_id, std::string(kBaselineLabel));
    doc["panels"].push_back({{"label", "rain"}, {"S", base.ssim}, {"P", base.psnr_hvs_m}});
    for (const auto& m : models) {
      const ScoreRecord& r = record_for(p.pair_id, m.model_name);
      nlohmann::ordered_json panel;
      panel["label"] = m.model_name;
      panel["S"] = r.ssim;
      panel["P"] = r.psnr_hvs_m;
      panel["gain_S"] = r.gain_ssim;
      panel["gain_P"] = r.gain_psnr_hvs_m;
      doc["panels"].push_back(std::move(panel));
    }
    write_file_atomic(out_dir / (p.pair_id + ".json"), doc.dump(2) + "\n");
  });
}

}  // namespace rainbench
