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


#ifndef QUALGATE_CONFIG_HPP_
#define QUALGATE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qualgate/agent.hpp"
#include "qualgate/backend.hpp"
#include "qualgate/controller.hpp"
#include "qualgate/features.hpp"
#include "qualgate/stream.hpp"

namespace qualgate {

struct BackendSpec {
  std::string kind = "oracle";  // "oracle" or "http"
  // Oracle spec files when kind == "oracle"; several are merged (one per
  // scenery, image ids must not collide).
  std::vector<std::string> oracles;
  HttpBackendConfig http;

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

// Everything a train or run invocation needs. The JSON form keeps the
// classic parameter names (c_ref, epsilon_min, gamma, mu_dec, r_th, K, p_0,
// omega, T, n) as top-level keys; the rest is grouped under "policy",
// "controller", "reward" and "backend".
struct RunConfig {
  int c_ref = 75;
  std::uint64_t K = 1000;
  std::string extractor = "dct-hist";
  std::vector<std::size_t> hidden = {64, 64};
  PolicyState policy;
  ControllerParams controller;
  BackendSpec backend;
  std::vector<std::string> manifests;
  bool shuffle = true;  // shuffle within each scenery, keeping scenery order
  std::string checkpoint = "agent.qgc";
  std::string log = "steps.jsonl";
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig default_run_config();

// Throws kConfigError on unknown keys, wrong types or invalid values.
// Relative manifest and oracle paths are resolved against base_dir when it
// is non-empty.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string dump_run_config(const RunConfig& config);
void validate(const RunConfig& config);

// Builders for the pieces a config describes.
std::unique_ptr<VisionBackend> make_backend(const RunConfig& config);
SceneryStream make_stream(const RunConfig& config);
std::shared_ptr<const FeatureExtractor> make_configured_extractor(const RunConfig& config);

}  // namespace qualgate

#endif  // QUALGATE_CONFIG_HPP_
