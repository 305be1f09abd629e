// Copyright 2026 The qualgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qualgate/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "qualgate/error.hpp"

namespace qualgate {

Raster::Raster(int width, int height)
    : width_(width),
      height_(height),
      rgb_(static_cast<std::size_t>(width) * height * 3, 0) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidImage, "negative raster dimensions");
  }
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 0 || height < 0 ||
      rgb_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::kInvalidImage, "pixel buffer does not match dimensions");
  }
}

void Raster::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (std::size_t i = 0; i < rgb_.size(); i += 3) {
    rgb_[i] = r;
    rgb_[i + 1] = g;
    rgb_[i + 2] = b;
  }
}

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kInvalidImage, std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw Error(ErrorCode::kInvalidImage, "png: zero-sized image");
  }
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kInvalidImage, "png: " + message);
  }
  return Raster(static_cast<int>(image.width), static_cast<int>(image.height), std::move(rgb));
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

void jpeg_silence(j_common_ptr, int) {}

// The setjmp frame holds only trivially destructible locals; the buffer
// is owned by the caller.
bool decode_jpeg_into(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& rgb,
                      int& width, int& height, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  err.message[0] = '\0';
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  rgb.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace

Raster decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) {
    std::vector<std::uint8_t> rgb;
    int width = 0;
    int height = 0;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_into(bytes, rgb, width, height, message)) {
      throw Error(ErrorCode::kInvalidImage, std::string("jpeg: ") + message);
    }
    if (width == 0 || height == 0) {
      throw Error(ErrorCode::kInvalidImage, "jpeg: zero-sized image");
    }
    return Raster(width, height, std::move(rgb));
  }
  throw Error(ErrorCode::kInvalidImage, "unrecognized image format (expected PNG or JPEG)");
}

Raster load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const Raster& image) {
  if (image.empty()) throw Error(ErrorCode::kInvalidImage, "cannot encode empty raster");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::kInternal, std::string("png sizing failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::kInternal, std::string("png write failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

void save_png(const Raster& image, const std::filesystem::path& path) {
  auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

LumaPlane to_luma(const Raster& image) {
  LumaPlane plane;
  plane.width = image.width();
  plane.height = image.height();
  plane.values.resize(static_cast<std::size_t>(plane.width) * plane.height);
  auto px = image.pixels();
  for (std::size_t i = 0; i < plane.values.size(); ++i) {
    plane.values[i] =
        (0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2]) / 255.0;
  }
  return plane;
}

namespace {

// Weights of source cells covering each destination cell along one axis.
struct Coverage {
  int first = 0;
  std::vector<double> weights;
};

std::vector<Coverage> axis_coverage(int src, int dst) {
  std::vector<Coverage> out(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    const double lo = d * scale;
    const double hi = (d + 1) * scale;
    auto& cov = out[static_cast<std::size_t>(d)];
    cov.first = static_cast<int>(std::floor(lo));
    const int last = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int s = cov.first; s <= last; ++s) {
      const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
      cov.weights.push_back(std::max(0.0, overlap) / scale);
    }
  }
  return out;
}

}  // namespace

LumaPlane resize_area(const LumaPlane& src, int width, int height) {
  if (src.width <= 0 || src.height <= 0 || width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidImage, "resize of empty plane");
  }
  const auto cols = axis_coverage(src.width, width);
  const auto rows = axis_coverage(src.height, height);

  // Horizontal pass, then vertical.
  std::vector<double> tmp(static_cast<std::size_t>(width) * src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& c = cols[static_cast<std::size_t>(x)];
      double acc = 0.0;
      for (std::size_t k = 0; k < c.weights.size(); ++k) {
        acc += c.weights[k] * src(c.first + static_cast<int>(k), y);
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  LumaPlane out;
  out.width = width;
  out.height = height;
  out.values.assign(static_cast<std::size_t>(width) * height, 0.0);
  for (int y = 0; y < height; ++y) {
    const auto& r = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < r.weights.size(); ++k) {
        acc += r.weights[k] * tmp[static_cast<std::size_t>(r.first + static_cast<int>(k)) * width + x];
      }
      out.values[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

}  // namespace qualgate
