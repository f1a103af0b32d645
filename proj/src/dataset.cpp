#include "rainbench/dataset.h"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "rainbench/error.h"
#include "rainbench/file_io.h"
#include "rainbench/parallel.h"
#include "rainbench/rng.h"

namespace rainbench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(SplitRole r) {
  switch (r) {
    case SplitRole::kTrain: return "train";
    case SplitRole::kTest: return "test";
    case SplitRole::kVal: return "val";
  }
  return "train";
}

SplitRole split_role_from_string(std::string_view s) {
  if (s == "train") return SplitRole::kTrain;
  if (s == "test") return SplitRole::kTest;
  if (s == "val") return SplitRole::kVal;
  throw Error(ErrorKind::kSchemaError, "unknown split role '" + std::string(s) + "'");
}

std::vector<PairEntry> DatasetManifest::pairs_with_role(SplitRole role) const {
  std::vector<PairEntry> out;
  for (const auto& p : pairs) {
    if (p.split_role == role) out.push_back(p);
  }
  return out;
}

DatasetManifest build_class_manifest(std::span<const AnnotationRecord> records, const std::string& image_dir,
                                     std::size_t per_class, std::uint64_t seed) {
  const auto clear = partition_by_weather(records, Weather::kClear);
  const auto rainy = partition_by_weather(records, Weather::kRainy);
  SeededRng rng(seed);
  const auto clear_pick = sample_subset(clear, per_class, rng);
  const auto rainy_pick = sample_subset(rainy, per_class, rng);

  auto to_path = [&](const AnnotationRecord& r) {
    return image_dir.empty() ? r.image_name : (fs::path(image_dir) / r.image_name).generic_string();
  };
  DatasetManifest m;
  m.seed = seed;
  for (const auto& r : clear_pick) m.clean_entries.push_back(to_path(r));
  for (const auto& r : rainy_pick) m.rain_entries.push_back(to_path(r));
  std::set<std::string> seen;
  for (const auto* list : {&m.clean_entries, &m.rain_entries}) {
    seen.clear();
    for (const auto& p : *list) {
      if (!seen.insert(p).second) {
        throw Error(ErrorKind::kSchemaError, "annotation file lists image '" + p + "' more than once");
      }
    }
  }
  return m;
}

namespace {

std::map<std::string, std::string> index_by_stem(std::span<const std::string> paths, std::string_view what) {
  std::map<std::string, std::string> out;
  for (const auto& p : paths) {
    const std::string stem = fs::path(p).stem().string();
    if (!out.emplace(stem, p).second) {
      throw Error(ErrorKind::kAmbiguousOutput, std::string(what) + " stem '" + stem + "' appears more than once");
    }
  }
  return out;
}

}  // namespace

std::vector<PairEntry> make_pairs(std::span<const std::string> clean_paths, std::span<const std::string> rain_paths) {
  const auto clean = index_by_stem(clean_paths, "clean");
  const auto rain = index_by_stem(rain_paths, "rain");
  std::vector<std::string> unmatched;
  for (const auto& [stem, _] : clean) {
    if (!rain.contains(stem)) unmatched.push_back(stem);
  }
  for (const auto& [stem, _] : rain) {
    if (!clean.contains(stem)) unmatched.push_back(stem);
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& s : unmatched) list += (list.empty() ? "" : ",") + s;
    throw Error(ErrorKind::kMissingOutput, "images without a counterpart: " + list);
  }
  std::vector<PairEntry> pairs;
  pairs.reserve(clean.size());
  for (const auto& [stem, path] : clean) {
    pairs.push_back(PairEntry{stem, path, rain.at(stem), SplitRole::kTrain});
  }
  return pairs;
}

std::vector<PairEntry> assign_splits(std::span<const PairEntry> pairs, SplitCounts counts, std::uint64_t seed) {
  if (counts.train + counts.test + counts.val != pairs.size()) {
    throw Error(ErrorKind::kCountMismatch,
                "split counts " + std::to_string(counts.train) + "+" + std::to_string(counts.test) + "+" +
                    std::to_string(counts.val) + " do not sum to " + std::to_string(pairs.size()));
  }
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SeededRng rng(seed);
  shuffle(order, rng);

  std::vector<PairEntry> out(pairs.begin(), pairs.end());
  for (std::size_t k = 0; k < order.size(); ++k) {
    SplitRole role = SplitRole::kTrain;
    if (k < counts.test) {
      role = SplitRole::kTest;
    } else if (k < counts.test + counts.val) {
      role = SplitRole::kVal;
    }
    out[order[k]].split_role = role;
  }
  return out;
}

ImageBuffer merge_pair(const ImageBuffer& rain, const ImageBuffer& clean) {
  if (rain.width() != clean.width() || rain.height() != clean.height()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "rain " + std::to_string(rain.width()) + "x" + std::to_string(rain.height()) + " vs clean " +
                    std::to_string(clean.width()) + "x" + std::to_string(clean.height()));
  }
  if (rain.channels() != clean.channels()) {
    throw Error(ErrorKind::kChannelMismatch, "rain has " + std::to_string(rain.channels()) +
                                                 " channels, clean has " + std::to_string(clean.channels()));
  }
  const std::size_t row = static_cast<std::size_t>(rain.width()) * rain.channels();
  std::vector<std::uint8_t> out(2 * row * rain.height());
  const auto r = rain.samples();
  const auto c = clean.samples();
  for (int y = 0; y < rain.height(); ++y) {
    auto* dst = out.data() + 2 * row * y;
    std::copy_n(r.data() + row * y, row, dst);
    std::copy_n(c.data() + row * y, row, dst + row);
  }
  return ImageBuffer(2 * rain.width(), rain.height(), rain.channels(), std::move(out));
}

RainCleanPair split_merged(const ImageBuffer& merged) {
  if (merged.width() % 2 != 0) {
    throw Error(ErrorKind::kOddWidth, "merged width " + std::to_string(merged.width()) + " is odd");
  }
  const int w = merged.width() / 2;
  const std::size_t half = static_cast<std::size_t>(w) * merged.channels();
  std::vector<std::uint8_t> left(half * merged.height());
  std::vector<std::uint8_t> right(half * merged.height());
  const auto s = merged.samples();
  for (int y = 0; y < merged.height(); ++y) {
    const auto* src = s.data() + 2 * half * y;
    std::copy_n(src, half, left.data() + half * y);
    std::copy_n(src + half, half, right.data() + half * y);
  }
  return {ImageBuffer(w, merged.height(), merged.channels(), std::move(left)),
          ImageBuffer(w, merged.height(), merged.channels(), std::move(right))};
}

std::string persist_manifest(const DatasetManifest& m) {
  ordered_json doc;
  doc["format_version"] = m.format_version;
  doc["seed"] = m.seed;
  doc["clean_entries"] = m.clean_entries;
  doc["rain_entries"] = m.rain_entries;
  doc["pairs"] = ordered_json::array();
  for (const auto& p : m.pairs) {
    ordered_json e;
    e["pair_id"] = p.pair_id;
    e["clean_path"] = p.clean_path;
    e["rain_path"] = p.rain_path;
    e["split_role"] = std::string(to_string(p.split_role));
    doc["pairs"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

DatasetManifest load_manifest(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::kSyntaxError, "manifest parse failed at byte " + std::to_string(e.byte));
  }
  try {
    DatasetManifest m;
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw Error(ErrorKind::kVersionError, "unsupported manifest format_version " +
                                                std::to_string(m.format_version));
    }
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.clean_entries = doc.at("clean_entries").get<std::vector<std::string>>();
    m.rain_entries = doc.at("rain_entries").get<std::vector<std::string>>();
    std::set<std::string> ids;
    for (const auto& e : doc.at("pairs")) {
      PairEntry p{e.at("pair_id").get<std::string>(), e.at("clean_path").get<std::string>(),
                  e.at("rain_path").get<std::string>(),
                  split_role_from_string(e.at("split_role").get<std::string>())};
      if (!ids.insert(p.pair_id).second) {
        throw Error(ErrorKind::kSchemaError, "duplicate pair_id '" + p.pair_id + "'");
      }
      m.pairs.push_back(std::move(p));
    }
    return m;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::kSchemaError, std::string("manifest: ") + e.what());
  }
}

fs::path resolve_path(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return base_dir / path;
}

void write_pair_layout(const DatasetManifest& manifest, const fs::path& base_dir, const fs::path& out_root,
                       unsigned threads) {
  for (const char* sub : {"rain", "norain", "merged"}) fs::create_directories(out_root / sub);
  parallel_for(manifest.pairs.size(), threads, [&](std::size_t i) {
    const PairEntry& p = manifest.pairs[i];
    const ImageBuffer rain = load_image(resolve_path(base_dir, p.rain_path).string());
    const ImageBuffer clean = load_image(resolve_path(base_dir, p.clean_path).string());
    const fs::path name = p.pair_id + ".png";
    save_png(rain, (out_root / "rain" / name).string());
    save_png(clean, (out_root / "norain" / name).string());
    save_png(merge_pair(rain, clean), (out_root / "merged" / name).string());
  });
}

}  // namespace rainbench
