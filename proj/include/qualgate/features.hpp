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

#ifndef QUALGATE_FEATURES_HPP_
#define QUALGATE_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "qualgate/image.hpp"

namespace qualgate {

struct FeatureVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool all_finite() const;
};

// (name, version) identifies the extractor function; checkpoints embed it and
// refuse to load against a different one.
struct ExtractorDescriptor {
  std::string name;
  std::size_t dim = 0;
  int version = 0;

  friend bool operator==(const ExtractorDescriptor&, const ExtractorDescriptor&) = default;
};

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual const ExtractorDescriptor& descriptor() const = 0;
  // Depends only on pixel content. Throws kInvalidImage on an empty raster.
  virtual FeatureVector extract(const Raster& image) const = 0;
};

// Built-in block-DCT / histogram extractor on a 64x64 luminance resample.
//
// Layout (dim 99):
//   [0, 64)   mean |DCT coefficient| per zigzag band over the 64 8x8 blocks
//   [64, 96)  32-bin luminance histogram, normalized to sum 1
//   96        mean luminance
//   97        luminance variance
//   98        edge density: fraction of interior pixels whose Sobel gradient
//             magnitude exceeds kEdgeThreshold
class DctHistogramExtractor final : public FeatureExtractor {
 public:
  static constexpr int kAnalysisSize = 64;
  static constexpr int kHistogramBins = 32;
  static constexpr std::size_t kBandOffset = 0;
  static constexpr std::size_t kHistogramOffset = 64;
  static constexpr std::size_t kMeanIndex = 96;
  static constexpr std::size_t kVarianceIndex = 97;
  static constexpr std::size_t kEdgeDensityIndex = 98;
  static constexpr std::size_t kDim = 99;
  // Luminance is in [0, 1]; a unit step edge gives magnitude 4.
  static constexpr double kEdgeThreshold = 0.25;

  DctHistogramExtractor();

  const ExtractorDescriptor& descriptor() const override { return descriptor_; }
  FeatureVector extract(const Raster& image) const override;

 private:
  ExtractorDescriptor descriptor_;
};

std::shared_ptr<const FeatureExtractor> default_extractor();

// Looks up an extractor by config name; throws kConfigError when unknown.
std::shared_ptr<const FeatureExtractor> make_extractor(const std::string& name);

// Zigzag scan order, entry k = row-major index of the k-th coefficient.
const std::array<int, 64>& zigzag_order();

}  // namespace qualgate

#endif  // QUALGATE_FEATURES_HPP_
