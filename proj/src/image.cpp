#include "rainbench/image.h"

#include <algorithm>
#include <csetjmp>
#include <cstdlib>
#include <cstdio>
#include <cstring>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "rainbench/error.h"
#include "rainbench/file_io.h"

namespace rainbench {

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::kInvalidArgument, "channels must be 1 or 3, got " + std::to_string(channels));
  }
  const auto expected = static_cast<std::size_t>(width) * height * channels;
  if (samples_.size() != expected) {
    throw Error(ErrorKind::kInvalidArgument, "sample count " + std::to_string(samples_.size()) +
                                                 " does not match " + std::to_string(expected));
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, std::uint8_t value) {
  const auto n = static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * std::max(channels, 0);
  return ImageBuffer(width, height, channels, std::vector<std::uint8_t>(n, value));
}

namespace {

bool has_png_signature(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t kSig[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= sizeof(kSig) && std::memcmp(b.data(), kSig, sizeof(kSig)) == 0;
}

bool has_jpeg_signature(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kMalformedStream, "png: " + msg);
  }
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    throw Error(ErrorKind::kUnsupportedFormat, "png with alpha channel is not accepted");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> samples(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, samples.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kMalformedStream, "png: " + msg);
  }
  return ImageBuffer(static_cast<int>(image.width), static_cast<int>(image.height), color ? 3 : 1,
                     std::move(samples));
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr) {}

// No objects with destructors may live in this frame: longjmp unwinds it.
// Returns false and fills `message` on decoder error.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& samples, int& width,
                     int& height, int& channels, char (&message)[JMSG_LENGTH_MAX]) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.base.output_message = jpeg_silence;
  if (setjmp(jerr.jump)) {
    std::memcpy(message, jerr.message, sizeof(message));
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  channels = cinfo.output_components;
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  samples.resize(stride * height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = samples.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> samples;
  int width = 0, height = 0, channels = 0;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_jpeg_raw(bytes, samples, width, height, channels, message)) {
    throw Error(ErrorKind::kMalformedStream, std::string("jpeg: ") + message);
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::kUnsupportedFormat, "jpeg with " + std::to_string(channels) + " components");
  }
  return ImageBuffer(width, height, channels, std::move(samples));
}

bool encode_jpeg_raw(const ImageBuffer& img, int quality, unsigned char*& out, unsigned long& out_size,
                     char (&message)[JMSG_LENGTH_MAX]) {
  jpeg_compress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.base.output_message = jpeg_silence;
  if (setjmp(jerr.jump)) {
    std::memcpy(message, jerr.message, sizeof(message));
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPLE*>(img.samples().data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

}  // namespace

ImageBuffer decode_image(std::span<const std::uint8_t> bytes, ImageFormat hint) {
  if (bytes.empty()) throw Error(ErrorKind::kMalformedStream, "empty input");
  const bool png = has_png_signature(bytes);
  const bool jpeg = has_jpeg_signature(bytes);
  switch (hint) {
    case ImageFormat::kPng:
      if (!png) throw Error(ErrorKind::kMalformedStream, "missing PNG signature");
      return decode_png(bytes);
    case ImageFormat::kJpeg:
      if (!jpeg) throw Error(ErrorKind::kMalformedStream, "missing JPEG SOI marker");
      return decode_jpeg(bytes);
    case ImageFormat::kAuto:
      break;
  }
  if (png) return decode_png(bytes);
  if (jpeg) return decode_jpeg(bytes);
  if (bytes.size() < 8) throw Error(ErrorKind::kMalformedStream, "stream too short to identify");
  throw Error(ErrorKind::kUnsupportedFormat, "neither PNG nor JPEG");
}

std::vector<std::uint8_t> encode_image(const ImageBuffer& img, ImageFormat format) {
  if (format != ImageFormat::kPng) {
    throw Error(ErrorKind::kUnsupportedFormat, "encode_image writes PNG only");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.samples().data(), 0, nullptr)) {
    throw Error(ErrorKind::kIoError, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.samples().data(), 0, nullptr)) {
    throw Error(ErrorKind::kIoError, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
  unsigned char* buf = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_jpeg_raw(img, quality, buf, size, message);
  std::vector<std::uint8_t> out;
  if (ok) out.assign(buf, buf + size);
  std::free(buf);
  if (!ok) throw Error(ErrorKind::kIoError, std::string("jpeg encode: ") + message);
  return out;
}

ImageBuffer to_luma(const ImageBuffer& img) {
  if (img.channels() == 1) return img;
  const auto src = img.samples();
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Integer form of 0.299/0.587/0.114 keeps the half-up rounding exact.
    const unsigned weighted = 299u * src[3 * i] + 587u * src[3 * i + 1] + 114u * src[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::min(255u, (weighted + 500u) / 1000u));
  }
  return ImageBuffer(img.width(), img.height(), 1, std::move(out));
}

ImageBuffer to_rgb(const ImageBuffer& img) {
  if (img.channels() == 3) return img;
  const auto src = img.samples();
  std::vector<std::uint8_t> out(src.size() * 3);
  for (std::size_t i = 0; i < src.size(); ++i) out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = src[i];
  return ImageBuffer(img.width(), img.height(), 3, std::move(out));
}

ImageBuffer load_image(const std::string_view path) {
  const auto bytes = read_file(std::filesystem::path(path));
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(path) + ": " + e.detail());
  }
}

void save_png(const ImageBuffer& img, const std::string_view path) {
  write_file_atomic(std::filesystem::path(path), encode_image(img));
}

}  // namespace rainbench
