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

#include <atomic>
#include <cstdlib>
#include <string>

#include "qualgate/error.hpp"
#include "qualgate/simd/kernels.hpp"

namespace qualgate::simd {

#ifndef QUALGATE_HAVE_AVX2_KERNELS
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports_avx2() {
#if defined(QUALGATE_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

namespace {

Isa detect_isa() {
  if (const char* env = std::getenv("QUALGATE_SIMD")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return cpu_supports_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !(cpu_supports_avx2() && avx2_kernels() != nullptr)) {
    throw Error(ErrorCode::kConfigError, "AVX2 kernels are not available on this machine");
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() {
  if (active_isa() == Isa::kAvx2) return *avx2_kernels();
  return scalar_kernels();
}

void gemv(std::span<const double> weights, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + k.dot(weights.data() + r * cols, x.data(), cols);
  }
}

void gemv_transposed(std::span<const double> weights, std::size_t rows, std::size_t cols,
                     std::span<const double> g, std::span<double> y) {
  const auto& k = active();
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], weights.data() + r * cols, y.data(), cols);
  }
}

}  // namespace qualgate::simd
