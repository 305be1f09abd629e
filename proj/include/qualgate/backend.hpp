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

#ifndef QUALGATE_BACKEND_HPP_
#define QUALGATE_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qualgate/codec.hpp"
#include "qualgate/metrics.hpp"

namespace qualgate {

// A remote (or simulated) image classifier. Implementations must be safe to
// call from several threads at once and must report failures as Error with
// kBackendUnavailable, kBackendRejected or kTimeout.
class VisionBackend {
 public:
  virtual ~VisionBackend() = default;
  virtual std::string name() const = 0;
  virtual PredictionResult classify(const CompressedImage& payload) = 0;
};

struct InvocationRecord {
  std::size_t request_bytes = 0;
  double latency_ms = 0.0;
};

// Uploads one encoded image and tags the result with its source quality.
// Throws kInvalidImage when the payload is not a JPEG.
PredictionResult invoke(VisionBackend& backend, const CompressedImage& payload,
                        InvocationRecord* record = nullptr);

// Per-image behaviour of the simulated classifier. An image is recognized
// iff it was uploaded at quality >= its fragility threshold q*; otherwise the
// answer is a fixed decoy label. With noise > 0 a recognized answer is
// replaced by the decoy with that probability, decided by a hash of
// (seed, image, quality) so repeated uploads agree.
struct OracleSpec {
  std::map<std::string, std::string> labels;
  std::map<std::string, int> fragility;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

// {"labels": {id: label}, "fragility": {id: q}, "noise": rho, "seed": s}
OracleSpec parse_oracle_spec(const std::string& json_text);
OracleSpec load_oracle_spec(const std::string& path);
std::string dump_oracle_spec(const OracleSpec& spec);
void validate(const OracleSpec& spec);
// Union of the label and fragility tables; noise and seed come from the
// first spec. Throws kConfigError on a duplicate image id.
OracleSpec merge_oracle_specs(const std::vector<OracleSpec>& specs);

class SimulatedOracle final : public VisionBackend {
 public:
  explicit SimulatedOracle(OracleSpec spec);

  std::string name() const override { return "oracle"; }
  // The upload quality is read back from the JPEG quantization table; the
  // image identity comes from payload.source_id.
  PredictionResult classify(const CompressedImage& payload) override;

  const OracleSpec& spec() const { return spec_; }
  std::string decoy_label(const std::string& source_id) const;
  std::uint64_t calls() const;

 private:
  OracleSpec spec_;
  mutable std::mutex mutex_;
  std::uint64_t calls_ = 0;
};

struct HttpBackendConfig {
  std::string url;
  std::map<std::string, std::string> headers;
  // Dotted path into the JSON response; "*" iterates an array, e.g.
  // "result.*.keyword" or "Labels.*.Name".
  std::string label_json_path = "labels";
  int timeout_ms = 10000;
  int min_interval_ms = 0;   // rate limit between request starts
  int retries = 1;           // retries after a transient failure
  int backoff_ms = 200;      // doubled per retry
  std::string content_type = "image/jpeg";

  friend bool operator==(const HttpBackendConfig&, const HttpBackendConfig&) = default;
};

// Throws kConfigError on a malformed URL or label path.
std::unique_ptr<VisionBackend> http_adapter(const HttpBackendConfig& config);

// Extracts labels from a parsed JSON document along label_json_path.
// Throws kBackendRejected when the path does not resolve to strings.
std::vector<std::string> extract_labels(const std::string& json_text, const std::string& path);

}  // namespace qualgate

#endif  // QUALGATE_BACKEND_HPP_
