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

#include "qualgate/codec.hpp"

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <jpeglib.h>

#include "qualgate/error.hpp"

namespace qualgate {

QualityLevel QualityLevel::from_value(int value) {
  if (value < 5 || value > 95 || (value - 5) % 10 != 0) {
    throw Error(ErrorCode::kUnsupportedQuality,
                "quality " + std::to_string(value) + " is not on the ladder {5,15,...,95}");
  }
  return QualityLevel((value - 5) / 10);
}

QualityLevel QualityLevel::from_index(int index) {
  if (index < 0 || index >= kNumQualityLevels) {
    throw Error(ErrorCode::kUnsupportedQuality,
                "ladder index " + std::to_string(index) + " outside [0, 9]");
  }
  return QualityLevel(index);
}

const std::array<QualityLevel, kNumQualityLevels>& quality_ladder() {
  static const std::array<QualityLevel, kNumQualityLevels> ladder = [] {
    std::array<QualityLevel, kNumQualityLevels> out{
        QualityLevel::from_index(0), QualityLevel::from_index(1), QualityLevel::from_index(2),
        QualityLevel::from_index(3), QualityLevel::from_index(4), QualityLevel::from_index(5),
        QualityLevel::from_index(6), QualityLevel::from_index(7), QualityLevel::from_index(8),
        QualityLevel::from_index(9)};
    return out;
  }();
  return ladder;
}

QualityLevel reference_quality() { return QualityLevel::from_value(75); }

namespace {

struct EncoderError {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void encoder_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<EncoderError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void encoder_silence(j_common_ptr, int) {}

// Writes into a malloc'd buffer owned by the caller (freed on both paths).
bool encode_jpeg(const Raster& image, int quality, unsigned char** out, unsigned long* out_size,
                 char* message) {
  jpeg_compress_struct cinfo;
  EncoderError err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = encoder_error_exit;
  err.base.emit_message = encoder_silence;
  err.message[0] = '\0';
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.optimize_coding = FALSE;
  cinfo.dct_method = JDCT_ISLOW;
  // 4:2:0 luma/chroma sampling.
  cinfo.comp_info[0].h_samp_factor = 2;
  cinfo.comp_info[0].v_samp_factor = 2;
  cinfo.comp_info[1].h_samp_factor = 1;
  cinfo.comp_info[1].v_samp_factor = 1;
  cinfo.comp_info[2].h_samp_factor = 1;
  cinfo.comp_info[2].v_samp_factor = 1;
  jpeg_start_compress(&cinfo, TRUE);
  const auto pixels = image.pixels();
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(pixels.data() +
                                     static_cast<std::size_t>(cinfo.next_scanline) * image.width() * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

}  // namespace

CompressedImage compress(const Raster& image, QualityLevel quality, std::string source_id) {
  if (image.empty()) throw Error(ErrorCode::kInvalidImage, "cannot compress an empty raster");
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_jpeg(image, quality.value(), &buffer, &size, message);
  CompressedImage out;
  if (ok) out.payload.assign(buffer, buffer + size);
  std::free(buffer);
  if (!ok) throw Error(ErrorCode::kInvalidImage, std::string("jpeg encode failed: ") + message);
  out.quality = quality;
  out.source_id = std::move(source_id);
  out.width = image.width();
  out.height = image.height();
  return out;
}

double compression_ratio(const CompressedImage& compressed, const CompressedImage& reference) {
  if (compressed.source_id != reference.source_id) {
    throw Error(ErrorCode::kMismatchedSource,
                "'" + compressed.source_id + "' vs reference '" + reference.source_id + "'");
  }
  if (reference.size_bytes() == 0) {
    throw Error(ErrorCode::kZeroReference, "reference encoding has zero bytes");
  }
  return static_cast<double>(compressed.size_bytes()) /
         static_cast<double>(reference.size_bytes());
}

namespace {

// IJG luminance table (natural order) and the zigzag -> natural map.
constexpr std::array<int, 64> kStdLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

std::array<int, 64> scaled_luminance_zigzag(int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> out{};
  for (int k = 0; k < 64; ++k) {
    const long v = (static_cast<long>(kStdLuminance[kZigzagToNatural[k]]) * scale + 50) / 100;
    out[k] = static_cast<int>(std::clamp(v, 1L, 255L));
  }
  return out;
}

std::optional<std::array<int, 64>> read_luma_table(std::span<const std::uint8_t> jpeg) {
  if (jpeg.size() < 4 || jpeg[0] != 0xFF || jpeg[1] != 0xD8) return std::nullopt;
  std::size_t pos = 2;
  while (pos + 4 <= jpeg.size()) {
    if (jpeg[pos] != 0xFF) return std::nullopt;
    const std::uint8_t marker = jpeg[pos + 1];
    if (marker == 0xDA || marker == 0xD9) return std::nullopt;  // SOS / EOI before DQT
    const std::size_t len = (static_cast<std::size_t>(jpeg[pos + 2]) << 8) | jpeg[pos + 3];
    if (len < 2 || pos + 2 + len > jpeg.size()) return std::nullopt;
    if (marker == 0xDB) {
      std::size_t p = pos + 4;
      const std::size_t end = pos + 2 + len;
      while (p < end) {
        const int precision = jpeg[p] >> 4;
        const int table_id = jpeg[p] & 0x0F;
        ++p;
        const std::size_t entry = precision == 0 ? 1 : 2;
        if (p + 64 * entry > end) return std::nullopt;
        if (table_id == 0) {
          std::array<int, 64> out{};
          for (int k = 0; k < 64; ++k) {
            out[k] = entry == 1 ? jpeg[p + k] : (jpeg[p + 2 * k] << 8) | jpeg[p + 2 * k + 1];
          }
          return out;
        }
        p += 64 * entry;
      }
    }
    pos += 2 + len;
  }
  return std::nullopt;
}

}  // namespace

std::optional<QualityLevel> detect_ladder_quality(std::span<const std::uint8_t> jpeg) {
  const auto table = read_luma_table(jpeg);
  if (!table) return std::nullopt;
  for (const auto& level : quality_ladder()) {
    if (scaled_luminance_zigzag(level.value()) == *table) return level;
  }
  return std::nullopt;
}

}  // namespace qualgate
