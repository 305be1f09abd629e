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

#ifndef QUALGATE_SIMD_KERNELS_HPP_
#define QUALGATE_SIMD_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

// Arithmetic inner loops used by the Q network and the feature extractor.
// Every kernel has a scalar reference implementation; wider variants are
// selected once at startup from CPUID and must agree with the reference to
// rounding (see tests/unit/simd_test.cpp).
namespace qualgate::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Orthonormal 2-D DCT-II of a row-major 8x8 block.
  void (*dct8x8)(const double* in, double* out);
};

const KernelTable& scalar_kernels();
// Null when the build has no AVX2 variant.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

// The ISA in use. Defaults to the widest supported one; QUALGATE_SIMD=scalar
// in the environment pins the reference kernels.
Isa active_isa();
// Throws kConfigError when the requested ISA is unavailable.
void set_active_isa(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

// y = W x + bias, W row-major rows x cols.
void gemv(std::span<const double> weights, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y);

// y = W^T g, W row-major rows x cols; y has length cols.
void gemv_transposed(std::span<const double> weights, std::size_t rows, std::size_t cols,
                     std::span<const double> g, std::span<double> y);

}  // namespace qualgate::simd

#endif  // QUALGATE_SIMD_KERNELS_HPP_
