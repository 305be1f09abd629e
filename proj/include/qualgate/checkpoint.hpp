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

#ifndef QUALGATE_CHECKPOINT_HPP_
#define QUALGATE_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>

#include "qualgate/agent.hpp"
#include "qualgate/features.hpp"

namespace qualgate {

// Checkpoint file layout (all integers little-endian):
//
//   8 bytes   magic "QGATECKP"
//   u32       format major version (readers reject other majors)
//   u32       format minor version (newer minors stay readable)
//   u32       header length H
//   H bytes   JSON header: extractor descriptor, policy hyperparameters,
//             layer shapes, parameter count
//   u64       parameter count P
//   P x f64   parameters, IEEE-754 binary64, layer order, weights then bias
//   u64       FNV-1a 64 checksum of every preceding byte
inline constexpr std::uint32_t kCheckpointMajor = 1;
inline constexpr std::uint32_t kCheckpointMinor = 0;

struct Checkpoint {
  QNetwork q;
  PolicyState policy;
  ExtractorDescriptor descriptor;
};

// Written to a sibling temp file, then renamed over path. Throws kIoError.
void save_checkpoint(const QNetwork& q, const PolicyState& policy, const ExtractorDescriptor& descriptor,
                     const std::filesystem::path& path);

// Throws kIoError (missing, truncated or corrupt), kVersionMismatch, and,
// when expected is given, kExtractorMismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ExtractorDescriptor>& expected = std::nullopt);

}  // namespace qualgate

#endif  // QUALGATE_CHECKPOINT_HPP_
