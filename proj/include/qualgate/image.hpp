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

#ifndef QUALGATE_IMAGE_HPP_
#define QUALGATE_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qualgate {

// Interleaved 8-bit RGB raster. Grayscale inputs are expanded on load so the
// rest of the pipeline sees one pixel layout.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height);
  Raster(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::span<const std::uint8_t> pixels() const { return rgb_; }
  std::span<std::uint8_t> pixels() { return rgb_; }

  std::uint8_t* at(int x, int y) {
    return rgb_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  const std::uint8_t* at(int x, int y) const {
    return rgb_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b);

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

// Decodes PNG or JPEG bytes (sniffed by signature). Throws kInvalidImage.
Raster decode_image(std::span<const std::uint8_t> bytes);

Raster load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Raster& image);
void save_png(const Raster& image, const std::filesystem::path& path);

// Row-major luminance plane in [0, 1], ITU-R BT.601 weights.
struct LumaPlane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double operator()(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

LumaPlane to_luma(const Raster& image);

// Area-averaging resample; every source pixel contributes in proportion to
// its overlap with the destination cell.
LumaPlane resize_area(const LumaPlane& src, int width, int height);

}  // namespace qualgate

#endif  // QUALGATE_IMAGE_HPP_
