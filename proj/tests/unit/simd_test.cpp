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


#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "qualgate/simd/kernels.hpp"

using namespace qualgate;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

// Textbook DCT-II, straight from the definition.
void naive_dct(const double* in, double* out) {
  const double pi = std::numbers::pi;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      const double cv = v == 0 ? std::sqrt(0.125) : 0.5;
      double s = 0.0;
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          s += in[y * 8 + x] * std::cos((2 * y + 1) * u * pi / 16.0) * std::cos((2 * x + 1) * v * pi / 16.0);
        }
      }
      out[u * 8 + v] = cu * cv * s;
    }
  }
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar dct matches the definition") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 50; ++rep) {
      auto block = random_vector(gen, 64);
      double want[64], got[64];
      naive_dct(block.data(), want);
      simd::scalar_kernels().dct8x8(block.data(), got);
      for (int i = 0; i < 64; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("constant block has energy only in DC") {
    std::vector<double> block(64, 0.5);
    double out[64];
    simd::scalar_kernels().dct8x8(block.data(), out);
    CHECK(out[0] == doctest::Approx(4.0));
    for (int i = 1; i < 64; ++i) CHECK(std::abs(out[i]) < 1e-12);
  }

  TEST_CASE("avx2 kernels agree with scalar") {
    const simd::KernelTable* wide = simd::avx2_kernels();
    if (wide == nullptr || !simd::cpu_supports_avx2()) {
      MESSAGE("AVX2 variant unavailable; skipping");
      return;
    }
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 gen(5);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 63u, 99u, 128u, 1001u}) {
      auto a = random_vector(gen, n);
      auto b = random_vector(gen, n);
      const double want = ref.dot(a.data(), b.data(), n);
      const double got = wide->dot(a.data(), b.data(), n);
      CHECK(got == doctest::Approx(want).epsilon(1e-12).scale(1.0));

      auto y1 = random_vector(gen, n);
      auto y2 = y1;
      ref.axpy(0.37, a.data(), y1.data(), n);
      wide->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));
    }
    for (int rep = 0; rep < 50; ++rep) {
      auto block = random_vector(gen, 64);
      double want[64], got[64];
      ref.dct8x8(block.data(), want);
      wide->dct8x8(block.data(), got);
      for (int i = 0; i < 64; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("gemv helpers follow the active table") {
    std::mt19937_64 gen(9);
    const std::size_t rows = 10, cols = 37;
    auto w = random_vector(gen, rows * cols);
    auto x = random_vector(gen, cols);
    auto bias = random_vector(gen, rows);
    auto g = random_vector(gen, rows);
    std::vector<double> y(rows), yt(cols);
    simd::gemv(w, rows, cols, x, bias, y);
    simd::gemv_transposed(w, rows, cols, g, yt);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = bias[r];
      for (std::size_t c = 0; c < cols; ++c) s += w[r * cols + c] * x[c];
      CHECK(y[r] == doctest::Approx(s).epsilon(1e-12));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += w[r * cols + c] * g[r];
      CHECK(yt[c] == doctest::Approx(s).epsilon(1e-12));
    }
  }

  TEST_CASE("isa can be pinned to scalar and restored") {
    const simd::Isa before = simd::active_isa();
    simd::set_active_isa(simd::Isa::kScalar);
    CHECK(simd::active_isa() == simd::Isa::kScalar);
    CHECK(&simd::active() == &simd::scalar_kernels());
    simd::set_active_isa(before);
    CHECK(simd::active_isa() == before);
  }
}
