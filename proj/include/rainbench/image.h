#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rainbench {

enum class PixelFormat { kGrayscale, kRgb };

enum class ImageFormat { kPng, kJpeg, kAuto };

// Decoded 8-bit raster, row-major and channel-interleaved. Immutable once
// built; the constructor rejects inconsistent shapes.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples);

  // Filled with a single value in every channel.
  static ImageBuffer filled(int width, int height, int channels, std::uint8_t value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  PixelFormat format() const noexcept {
    return channels_ == 1 ? PixelFormat::kGrayscale : PixelFormat::kRgb;
  }
  std::span<const std::uint8_t> samples() const noexcept { return samples_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> samples_;
};

/// Decodes PNG or JPEG. Images with an alpha channel are rejected with
/// UnsupportedFormat; 16-bit PNGs are reduced to 8 bits.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes, ImageFormat hint = ImageFormat::kAuto);

/// Only PNG is accepted; merged pairs and galleries need lossless output.
std::vector<std::uint8_t> encode_image(const ImageBuffer& img, ImageFormat format = ImageFormat::kPng);

// Lossy encoder kept for fixtures and interop tests.
std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality);

/// BT.601 luma, Y = 0.299 R + 0.587 G + 0.114 B, rounded half-up.
/// Grayscale input is returned unchanged.
ImageBuffer to_luma(const ImageBuffer& img);

// Replicates a grayscale plane into three channels; RGB passes through.
ImageBuffer to_rgb(const ImageBuffer& img);

ImageBuffer load_image(const std::string_view path);
void save_png(const ImageBuffer& img, const std::string_view path);

}  // namespace rainbench
