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

#ifndef QUALGATE_CODEC_HPP_
#define QUALGATE_CODEC_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qualgate/image.hpp"

namespace qualgate {

inline constexpr int kNumQualityLevels = 10;

// One rung of the JPEG quality ladder {5, 15, ..., 95}. Construction from an
// arbitrary integer rejects off-ladder values instead of rounding them, so an
// action index and the encoder setting can never drift apart.
class QualityLevel {
 public:
  static QualityLevel from_value(int value);
  static QualityLevel from_index(int index);

  int value() const { return 5 + 10 * index_; }
  int index() const { return index_; }

  friend auto operator<=>(const QualityLevel&, const QualityLevel&) = default;

 private:
  explicit constexpr QualityLevel(int index) : index_(index) {}
  int index_;
};

const std::array<QualityLevel, kNumQualityLevels>& quality_ladder();

// Quality used for the size baseline and for the reference prediction.
QualityLevel reference_quality();

struct CompressedImage {
  std::vector<std::uint8_t> payload;
  QualityLevel quality = reference_quality();
  std::string source_id;
  int width = 0;
  int height = 0;

  std::size_t size_bytes() const { return payload.size(); }
};

// Baseline JPEG, 4:2:0 chroma, Huffman tables fixed (no optimization pass):
// identical input yields byte-identical output.
CompressedImage compress(const Raster& image, QualityLevel quality, std::string source_id = {});

// s_c / s_ref, unclamped; values above 1 are legal.
double compression_ratio(const CompressedImage& compressed, const CompressedImage& reference);

// Recovers the ladder quality a JPEG was encoded at by matching its luminance
// quantization table against the scaled IJG table. Empty when the payload is
// not a JPEG or the table matches no ladder rung.
std::optional<QualityLevel> detect_ladder_quality(std::span<const std::uint8_t> jpeg);

}  // namespace qualgate

#endif  // QUALGATE_CODEC_HPP_
