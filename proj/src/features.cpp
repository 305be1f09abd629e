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

#include "qualgate/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qualgate/error.hpp"
#include "qualgate/simd/kernels.hpp"

namespace qualgate {

bool FeatureVector::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

const std::array<int, 64>& zigzag_order() {
  static const std::array<int, 64> order = {
      0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
      12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
      35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
      58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};
  return order;
}

DctHistogramExtractor::DctHistogramExtractor()
    : descriptor_{"dct-hist", kDim, 1} {}

FeatureVector DctHistogramExtractor::extract(const Raster& image) const {
  if (image.empty()) throw Error(ErrorCode::kInvalidImage, "cannot extract features from an empty raster");
  const LumaPlane luma = to_luma(image);
  const LumaPlane plane = (luma.width == kAnalysisSize && luma.height == kAnalysisSize)
                              ? luma
                              : resize_area(luma, kAnalysisSize, kAnalysisSize);

  FeatureVector out;
  out.values.assign(kDim, 0.0);

  const auto& kernels = simd::active();
  const auto& zigzag = zigzag_order();
  constexpr int kBlocks = kAnalysisSize / 8;
  std::array<double, 64> block{};
  std::array<double, 64> coeffs{};
  for (int by = 0; by < kBlocks; ++by) {
    for (int bx = 0; bx < kBlocks; ++bx) {
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) block[y * 8 + x] = plane(bx * 8 + x, by * 8 + y);
      }
      kernels.dct8x8(block.data(), coeffs.data());
      for (int k = 0; k < 64; ++k) out.values[kBandOffset + k] += std::abs(coeffs[zigzag[k]]);
    }
  }
  for (int k = 0; k < 64; ++k) out.values[kBandOffset + k] /= kBlocks * kBlocks;

  const double count = static_cast<double>(plane.values.size());
  double sum = 0.0;
  for (double v : plane.values) {
    const int bin = std::clamp(static_cast<int>(v * kHistogramBins), 0, kHistogramBins - 1);
    out.values[kHistogramOffset + bin] += 1.0;
    sum += v;
  }
  for (int b = 0; b < kHistogramBins; ++b) out.values[kHistogramOffset + b] /= count;

  const double mean = sum / count;
  double var = 0.0;
  for (double v : plane.values) var += (v - mean) * (v - mean);
  out.values[kMeanIndex] = mean;
  out.values[kVarianceIndex] = var / count;

  int strong = 0;
  int interior = 0;
  for (int y = 1; y < kAnalysisSize - 1; ++y) {
    for (int x = 1; x < kAnalysisSize - 1; ++x) {
      const double gx = (plane(x + 1, y - 1) + 2 * plane(x + 1, y) + plane(x + 1, y + 1)) -
                        (plane(x - 1, y - 1) + 2 * plane(x - 1, y) + plane(x - 1, y + 1));
      const double gy = (plane(x - 1, y + 1) + 2 * plane(x, y + 1) + plane(x + 1, y + 1)) -
                        (plane(x - 1, y - 1) + 2 * plane(x, y - 1) + plane(x + 1, y - 1));
      if (std::sqrt(gx * gx + gy * gy) > kEdgeThreshold) ++strong;
      ++interior;
    }
  }
  out.values[kEdgeDensityIndex] = static_cast<double>(strong) / interior;
  return out;
}

std::shared_ptr<const FeatureExtractor> default_extractor() {
  static const auto instance = std::make_shared<const DctHistogramExtractor>();
  return instance;
}

std::shared_ptr<const FeatureExtractor> make_extractor(const std::string& name) {
  if (name == "dct-hist" || name == "default") return default_extractor();
  throw Error(ErrorCode::kConfigError, "unknown feature extractor '" + name + "'");
}

}  // namespace qualgate
