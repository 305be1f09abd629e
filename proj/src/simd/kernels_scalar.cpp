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

#include <array>
#include <cmath>
#include <numbers>

#include "qualgate/simd/kernels.hpp"
#include "simd/dct_basis.hpp"

namespace qualgate::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void dct8x8_scalar(const double* in, double* out) {
  const auto& c = dct_basis();
  std::array<double, 64> tmp{};
  // tmp = X C^T
  for (int i = 0; i < 8; ++i) {
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int j = 0; j < 8; ++j) acc += in[i * 8 + j] * c[k * 8 + j];
      tmp[i * 8 + k] = acc;
    }
  }
  // out = C tmp
  for (int u = 0; u < 8; ++u) {
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int i = 0; i < 8; ++i) acc += c[u * 8 + i] * tmp[i * 8 + k];
      out[u * 8 + k] = acc;
    }
  }
}

}  // namespace

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> c{};
    for (int k = 0; k < 8; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n) {
        c[k * 8 + n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
      }
    }
    return c;
  }();
  return basis;
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{dot_scalar, axpy_scalar, dct8x8_scalar};
  return table;
}

}  // namespace qualgate::simd
