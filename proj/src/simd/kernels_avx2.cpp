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

// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "qualgate/simd/kernels.hpp"
#include "simd/dct_basis.hpp"

namespace qualgate::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Rows of an 8x8 double block are two 4-lane registers.
void dct8x8_avx2(const double* in, double* out) {
  const double* c = dct_basis().data();
  alignas(32) double ct[64];
  for (int j = 0; j < 8; ++j) {
    for (int k = 0; k < 8; ++k) ct[j * 8 + k] = c[k * 8 + j];
  }
  // tmp row i = sum_j X[i][j] * (C^T row j)
  __m256d tmp_lo[8];
  __m256d tmp_hi[8];
  for (int i = 0; i < 8; ++i) {
    __m256d lo = _mm256_setzero_pd();
    __m256d hi = _mm256_setzero_pd();
    for (int j = 0; j < 8; ++j) {
      const __m256d x = _mm256_set1_pd(in[i * 8 + j]);
      lo = _mm256_fmadd_pd(x, _mm256_load_pd(ct + j * 8), lo);
      hi = _mm256_fmadd_pd(x, _mm256_load_pd(ct + j * 8 + 4), hi);
    }
    tmp_lo[i] = lo;
    tmp_hi[i] = hi;
  }
  // out row u = sum_i C[u][i] * tmp row i
  for (int u = 0; u < 8; ++u) {
    __m256d lo = _mm256_setzero_pd();
    __m256d hi = _mm256_setzero_pd();
    for (int i = 0; i < 8; ++i) {
      const __m256d w = _mm256_set1_pd(c[u * 8 + i]);
      lo = _mm256_fmadd_pd(w, tmp_lo[i], lo);
      hi = _mm256_fmadd_pd(w, tmp_hi[i], hi);
    }
    _mm256_storeu_pd(out + u * 8, lo);
    _mm256_storeu_pd(out + u * 8 + 4, hi);
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{dot_avx2, axpy_avx2, dct8x8_avx2};
  return &table;
}

}  // namespace qualgate::simd
