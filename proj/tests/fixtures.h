#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rainbench/image.h"
#include "rainbench/rng.h"

namespace rainbench::testing {

ImageBuffer random_image(int width, int height, int channels, SeededRng& rng);

// Smooth gradients plus mild texture, closer to photographs than noise.
ImageBuffer natural_image(int width, int height, int channels, std::uint64_t seed);

// Uniform integer noise in [-amplitude, amplitude], clamped to [0, 255].
ImageBuffer add_noise(const ImageBuffer& img, int amplitude, SeededRng& rng);

// Reference plus a deterministic structured distortion: a diagonal
// sinusoid, a brightness ramp and an 8-pixel blocking offset.
ImageBuffer structured_distortion(const ImageBuffer& img, double strength);

// Streaks of brightened pixels, a crude stand-in for synthetic rain.
ImageBuffer add_streaks(const ImageBuffer& img, int count, std::uint64_t seed);

// Removes the directory tree on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// BDD100K-style label JSON with the given weather composition, shuffled
// by `seed`. Other-weather entries cycle through the remaining BDD labels.
std::string bdd_annotation_json(std::size_t rainy, std::size_t clear, std::size_t other, std::uint64_t seed);

}  // namespace rainbench::testing
