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

#include "qualgate/error.hpp"

namespace qualgate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidImage: return "InvalidImage";
    case ErrorCode::kUnsupportedQuality: return "UnsupportedQuality";
    case ErrorCode::kMismatchedSource: return "MismatchedSource";
    case ErrorCode::kZeroReference: return "ZeroReference";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInsufficientMemory: return "InsufficientMemory";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kExtractorMismatch: return "ExtractorMismatch";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kBackendRejected: return "BackendRejected";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace qualgate
