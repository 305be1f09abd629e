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

#ifndef QUALGATE_SRC_SIMD_DCT_BASIS_HPP_
#define QUALGATE_SRC_SIMD_DCT_BASIS_HPP_

#include <array>

namespace qualgate::simd {

// Row k holds the k-th orthonormal DCT-II basis vector (row-major 8x8).
const std::array<double, 64>& dct_basis();

}  // namespace qualgate::simd

#endif  // QUALGATE_SRC_SIMD_DCT_BASIS_HPP_
