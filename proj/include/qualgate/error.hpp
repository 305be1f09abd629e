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

#ifndef QUALGATE_ERROR_HPP_
#define QUALGATE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qualgate {

enum class ErrorCode {
  kInvalidImage,
  kUnsupportedQuality,
  kMismatchedSource,
  kZeroReference,
  kEmptyWindow,
  kDimensionMismatch,
  kInsufficientMemory,
  kIoError,
  kVersionMismatch,
  kExtractorMismatch,
  kBackendUnavailable,
  kBackendRejected,
  kTimeout,
  kConfigError,
  kInternal,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on the class of error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Transient backend failures may be retried; everything else is final.
  bool retryable() const noexcept {
    return code_ == ErrorCode::kBackendUnavailable ||
           code_ == ErrorCode::kTimeout;
  }

 private:
  ErrorCode code_;
};

}  // namespace qualgate

#endif  // QUALGATE_ERROR_HPP_
