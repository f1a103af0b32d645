#include "fixtures.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace rainbench::testing {

namespace fs = std::filesystem;

namespace {
std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }
}  // namespace

ImageBuffer random_image(int width, int height, int channels, SeededRng& rng) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(width) * height * channels);
  for (auto& v : s) v = static_cast<std::uint8_t>(rng.below(256));
  return ImageBuffer(width, height, channels, std::move(s));
}

ImageBuffer natural_image(int width, int height, int channels, std::uint64_t seed) {
  SeededRng rng(seed);
  const double fx = 1.0 + static_cast<double>(rng.below(1000)) / 250.0;
  const double fy = 1.0 + static_cast<double>(rng.below(1000)) / 250.0;
  const double phase = static_cast<double>(rng.below(6283)) / 1000.0;
  std::vector<std::uint8_t> s(static_cast<std::size_t>(width) * height * channels);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const double base = 128 + 60 * std::sin(fx * x / width * 6.28 + phase + c) * std::cos(fy * y / height * 6.28);
        const double ramp = 40.0 * (x + y) / (width + height) - 20;
        const double grain = static_cast<double>(rng.below(21)) - 10;
        s[(static_cast<std::size_t>(y) * width + x) * channels + c] = clamp8(base + ramp + grain);
      }
    }
  }
  return ImageBuffer(width, height, channels, std::move(s));
}

ImageBuffer add_noise(const ImageBuffer& img, int amplitude, SeededRng& rng) {
  std::vector<std::uint8_t> s(img.samples().begin(), img.samples().end());
  for (auto& v : s) {
    const int d = static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(amplitude) + 1)) - amplitude;
    v = clamp8(v + d);
  }
  return ImageBuffer(img.width(), img.height(), img.channels(), std::move(s));
}

ImageBuffer structured_distortion(const ImageBuffer& img, double strength) {
  std::vector<std::uint8_t> s(img.samples().begin(), img.samples().end());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double wave = std::sin((x + 2 * y) * 0.7);
      const double ramp = (x - img.width() / 2.0) / img.width();
      const double block = ((x / 8 + y / 8) % 2 == 0) ? 1.0 : -1.0;
      for (int c = 0; c < img.channels(); ++c) {
        auto& v = s[(static_cast<std::size_t>(y) * img.width() + x) * img.channels() + c];
        v = clamp8(v + strength * (6 * wave + 4 * ramp + 2 * block));
      }
    }
  }
  return ImageBuffer(img.width(), img.height(), img.channels(), std::move(s));
}

ImageBuffer add_streaks(const ImageBuffer& img, int count, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::uint8_t> s(img.samples().begin(), img.samples().end());
  for (int k = 0; k < count; ++k) {
    const int x0 = static_cast<int>(rng.below(img.width()));
    const int y0 = static_cast<int>(rng.below(img.height()));
    const int len = 4 + static_cast<int>(rng.below(10));
    for (int t = 0; t < len; ++t) {
      const int x = x0 + t / 3;
      const int y = y0 + t;
      if (x >= img.width() || y >= img.height()) break;
      for (int c = 0; c < img.channels(); ++c) {
        auto& v = s[(static_cast<std::size_t>(y) * img.width() + x) * img.channels() + c];
        v = clamp8(v * 0.5 + 120);
      }
    }
  }
  return ImageBuffer(img.width(), img.height(), img.channels(), std::move(s));
}

TempDir::TempDir() {
  std::random_device rd;
  char name[64];
  std::snprintf(name, sizeof(name), "rainbench-test-%08x%08x", rd(), rd());
  path_ = fs::temp_directory_path() / name;
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string bdd_annotation_json(std::size_t rainy, std::size_t clear, std::size_t other, std::uint64_t seed) {
  static const char* kOther[] = {"overcast", "snowy", "partly cloudy", "foggy", "undefined"};
  std::vector<std::string> weathers;
  weathers.insert(weathers.end(), rainy, "rainy");
  weathers.insert(weathers.end(), clear, "clear");
  for (std::size_t i = 0; i < other; ++i) weathers.push_back(kOther[i % 5]);
  SeededRng rng(seed);
  shuffle(weathers, rng);
  std::string out = "[";
  char buf[256];
  for (std::size_t i = 0; i < weathers.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "%s\n {\"name\": \"img%06zu.jpg\", \"attributes\": {\"weather\": \"%s\", \"scene\": \"city street\", "
                  "\"timeofday\": \"daytime\"}, \"timestamp\": 10000, \"labels\": []}",
                  i == 0 ? "" : ",", i, weathers[i].c_str());
    out += buf;
  }
  out += "\n]\n";
  return out;
}

}  // namespace rainbench::testing
