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

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qualgate/backend.hpp"
#include "qualgate/error.hpp"
#include "qualgate/rng.hpp"

namespace qualgate {

PredictionResult invoke(VisionBackend& backend, const CompressedImage& payload, InvocationRecord* record) {
  const auto& bytes = payload.payload;
  if (bytes.size() < 3 || bytes[0] != 0xFF || bytes[1] != 0xD8) {
    throw Error(ErrorCode::kInvalidImage, "upload payload is not a JPEG");
  }
  const auto start = std::chrono::steady_clock::now();
  PredictionResult result = backend.classify(payload);
  const auto stop = std::chrono::steady_clock::now();
  result.source_quality = payload.quality;
  if (record != nullptr) {
    record->request_bytes = payload.size_bytes();
    record->latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return result;
}

void validate(const OracleSpec& spec) {
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "oracle noise must lie in [0, 1]");
  }
  for (const auto& [id, q] : spec.fragility) {
    QualityLevel::from_value(q);
    if (!spec.labels.contains(id)) {
      throw Error(ErrorCode::kConfigError, "oracle image '" + id + "' has a fragility but no label");
    }
  }
  for (const auto& [id, label] : spec.labels) {
    if (!spec.fragility.contains(id)) {
      throw Error(ErrorCode::kConfigError, "oracle image '" + id + "' has a label but no fragility");
    }
    if (label.empty()) throw Error(ErrorCode::kConfigError, "oracle label for '" + id + "' is empty");
  }
}

OracleSpec merge_oracle_specs(const std::vector<OracleSpec>& specs) {
  OracleSpec out;
  if (specs.empty()) return out;
  out.noise = specs.front().noise;
  out.seed = specs.front().seed;
  for (const auto& spec : specs) {
    for (const auto& [id, label] : spec.labels) {
      if (!out.labels.emplace(id, label).second) {
        throw Error(ErrorCode::kConfigError, "duplicate image id '" + id + "' across oracle specs");
      }
    }
    out.fragility.insert(spec.fragility.begin(), spec.fragility.end());
  }
  validate(out);
  return out;
}

OracleSpec parse_oracle_spec(const std::string& json_text) {
  OracleSpec spec;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    spec.labels = doc.at("labels").get<std::map<std::string, std::string>>();
    spec.fragility = doc.at("fragility").get<std::map<std::string, int>>();
    spec.noise = doc.value("noise", 0.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("oracle spec: ") + e.what());
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("oracle spec: ") + e.what());
  }
  return spec;
}

OracleSpec load_oracle_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open oracle spec " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_oracle_spec(buffer.str());
}

std::string dump_oracle_spec(const OracleSpec& spec) {
  nlohmann::json doc;
  doc["labels"] = spec.labels;
  doc["fragility"] = spec.fragility;
  doc["noise"] = spec.noise;
  doc["seed"] = spec.seed;
  return doc.dump(2);
}

SimulatedOracle::SimulatedOracle(OracleSpec spec) : spec_(std::move(spec)) { validate(spec_); }

namespace {

std::uint64_t hash_string(std::uint64_t seed, const std::string& s) {
  std::uint64_t h = mix64(seed);
  for (unsigned char c : s) h = mix64(h ^ c);
  return h;
}

constexpr const char* kDecoys[] = {"window screen", "jigsaw puzzle", "fountain",  "prayer rug",
                                   "web site",      "envelope",      "doormat",   "chain mail",
                                   "honeycomb",     "velvet",        "wool",      "theater curtain"};

}  // namespace

std::string SimulatedOracle::decoy_label(const std::string& source_id) const {
  const auto& truth = spec_.labels.at(source_id);
  const std::size_t n = std::size(kDecoys);
  std::size_t k = hash_string(spec_.seed ^ 0xDEC0ULL, source_id) % n;
  // Never collide with the true label.
  if (normalize_label(kDecoys[k]) == normalize_label(truth)) k = (k + 1) % n;
  return kDecoys[k];
}

std::uint64_t SimulatedOracle::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

PredictionResult SimulatedOracle::classify(const CompressedImage& payload) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  const auto label = spec_.labels.find(payload.source_id);
  if (label == spec_.labels.end()) {
    throw Error(ErrorCode::kBackendRejected, "oracle has no entry for image '" + payload.source_id + "'");
  }
  const auto quality = detect_ladder_quality(payload.payload);
  if (!quality) {
    throw Error(ErrorCode::kBackendRejected, "oracle could not read a ladder quality from the upload");
  }
  const int threshold = spec_.fragility.at(payload.source_id);
  bool recognized = quality->value() >= threshold;
  if (recognized && spec_.noise > 0.0) {
    const std::uint64_t h =
        hash_string(spec_.seed, payload.source_id) ^ mix64(static_cast<std::uint64_t>(quality->value()));
    const double u = static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
    if (u < spec_.noise) recognized = false;
  }
  PredictionResult result;
  result.labels.push_back(recognized ? label->second : decoy_label(payload.source_id));
  return result;
}

}  // namespace qualgate
