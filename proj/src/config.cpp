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


#include "qualgate/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qualgate/codec.hpp"
#include "qualgate/error.hpp"

namespace qualgate {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(std::string("bad value for '") + key + "'");
  }
}

std::string resolve(const std::string& path, const std::filesystem::path& base) {
  if (path.empty() || base.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (base / p).lexically_normal().string();
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.policy.optimizer = OptimizerKind::kAdam;
  c.policy.minibatch_size = 64;
  c.policy.gradient_steps = 64;
  c.policy.target_sync_interval = 5;
  c.policy.pooled_bootstrap = true;
  c.policy.rng_seed = c.seed;
  return c;
}

void validate(const RunConfig& c) {
  if (c.c_ref != reference_quality().value()) fail("c_ref must be 75 (the reference quality is fixed)");
  if (c.extractor.empty()) fail("extractor name is empty");
  if (c.hidden.empty()) fail("hidden must list at least one layer width");
  for (std::size_t w : c.hidden) {
    if (w == 0) fail("hidden layer widths must be positive");
  }
  const PolicyState& p = c.policy;
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(p.epsilon) || !in_unit(p.epsilon_min) || p.epsilon < p.epsilon_min) {
    fail("epsilon and epsilon_min must lie in [0, 1] with epsilon >= epsilon_min");
  }
  if (!(p.mu_dec > 0.0 && p.mu_dec <= 1.0)) fail("mu_dec must lie in (0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (p.train_interval <= 0) fail("T must be positive");
  if (p.train_start < 0) fail("T_start must be non-negative");
  if (p.minibatch_size == 0) fail("minibatch_size must be positive");
  if (p.memory_capacity < p.minibatch_size) fail("memory_capacity must be at least minibatch_size");
  if (!(p.learning_rate > 0.0) || !std::isfinite(p.learning_rate)) fail("learning_rate must be positive");
  if (p.gradient_steps <= 0) fail("gradient_steps must be positive");
  if (p.target_sync_interval < 0) fail("target_sync_interval must be non-negative");
  validate(c.controller);
  if (c.backend.kind != "oracle" && c.backend.kind != "http") fail("backend.kind must be 'oracle' or 'http'");
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"c_ref", "K", "T", "n", "epsilon_min", "gamma", "mu_dec", "r_th", "p_0", "omega", "seed",
                  "extractor", "manifest", "shuffle", "checkpoint", "log", "reward", "policy", "controller",
                  "backend"},
                 "config");

  RunConfig c = default_run_config();
  read(j, "c_ref", c.c_ref);
  read(j, "K", c.K);
  read(j, "T", c.policy.train_interval);
  read(j, "n", c.controller.n);
  read(j, "epsilon_min", c.policy.epsilon_min);
  read(j, "gamma", c.policy.gamma);
  read(j, "mu_dec", c.policy.mu_dec);
  read(j, "r_th", c.controller.r_th);
  read(j, "p_0", c.controller.p_0);
  read(j, "omega", c.controller.omega);
  read(j, "seed", c.seed);
  read(j, "extractor", c.extractor);
  read(j, "shuffle", c.shuffle);
  read(j, "checkpoint", c.checkpoint);
  read(j, "log", c.log);
  if (auto it = j.find("manifest"); it != j.end()) {
    if (it->is_string()) {
      c.manifests = {it->get<std::string>()};
    } else {
      read(j, "manifest", c.manifests);
    }
  }
  for (auto& m : c.manifests) m = resolve(m, base_dir);

  if (auto it = j.find("reward"); it != j.end()) {
    reject_unknown(*it, {"alpha", "beta"}, "reward");
    read(*it, "alpha", c.controller.reward.alpha);
    read(*it, "beta", c.controller.reward.beta);
  }
  if (auto it = j.find("policy"); it != j.end()) {
    const json& p = *it;
    reject_unknown(p,
                   {"epsilon", "T_start", "minibatch_size", "memory_capacity", "learning_rate", "optimizer",
                    "gradient_steps", "target_sync_interval", "pooled_bootstrap", "hidden"},
                   "policy");
    read(p, "epsilon", c.policy.epsilon);
    read(p, "T_start", c.policy.train_start);
    read(p, "minibatch_size", c.policy.minibatch_size);
    read(p, "memory_capacity", c.policy.memory_capacity);
    read(p, "learning_rate", c.policy.learning_rate);
    read(p, "gradient_steps", c.policy.gradient_steps);
    read(p, "target_sync_interval", c.policy.target_sync_interval);
    read(p, "pooled_bootstrap", c.policy.pooled_bootstrap);
    read(p, "hidden", c.hidden);
    if (auto o = p.find("optimizer"); o != p.end()) {
      if (!o->is_string()) fail("bad value for 'optimizer'");
      c.policy.optimizer = optimizer_from_string(o->get<std::string>());
    }
  }
  if (auto it = j.find("controller"); it != j.end()) {
    const json& k = *it;
    reject_unknown(k, {"p_min", "epsilon_retrain", "retrain_min_steps", "retrain_train_start", "concurrent_uploads"},
                   "controller");
    read(k, "p_min", c.controller.p_min);
    read(k, "epsilon_retrain", c.controller.epsilon_retrain);
    read(k, "retrain_min_steps", c.controller.retrain_min_steps);
    read(k, "retrain_train_start", c.controller.retrain_train_start);
    read(k, "concurrent_uploads", c.controller.concurrent_uploads);
  }
  if (auto it = j.find("backend"); it != j.end()) {
    const json& b = *it;
    reject_unknown(b,
                   {"kind", "oracle", "url", "headers", "label_path", "timeout_ms", "min_interval_ms", "retries",
                    "backoff_ms", "content_type"},
                   "backend");
    read(b, "kind", c.backend.kind);
    if (auto o = b.find("oracle"); o != b.end()) {
      if (o->is_string()) {
        c.backend.oracles = {o->get<std::string>()};
      } else {
        read(b, "oracle", c.backend.oracles);
      }
    }
    for (auto& o : c.backend.oracles) o = resolve(o, base_dir);
    read(b, "url", c.backend.http.url);
    read(b, "headers", c.backend.http.headers);
    read(b, "label_path", c.backend.http.label_json_path);
    read(b, "timeout_ms", c.backend.http.timeout_ms);
    read(b, "min_interval_ms", c.backend.http.min_interval_ms);
    read(b, "retries", c.backend.http.retries);
    read(b, "backoff_ms", c.backend.http.backoff_ms);
    read(b, "content_type", c.backend.http.content_type);
  }
  c.policy.rng_seed = c.seed;
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.parent_path());
}

std::string dump_run_config(const RunConfig& c) {
  ordered_json j;
  j["c_ref"] = c.c_ref;
  j["K"] = c.K;
  j["T"] = c.policy.train_interval;
  j["n"] = c.controller.n;
  j["epsilon_min"] = c.policy.epsilon_min;
  j["gamma"] = c.policy.gamma;
  j["mu_dec"] = c.policy.mu_dec;
  j["r_th"] = c.controller.r_th;
  j["p_0"] = c.controller.p_0;
  j["omega"] = c.controller.omega;
  j["seed"] = c.seed;
  j["extractor"] = c.extractor;
  j["manifest"] = c.manifests;
  j["shuffle"] = c.shuffle;
  j["checkpoint"] = c.checkpoint;
  j["log"] = c.log;
  j["reward"] = {{"alpha", c.controller.reward.alpha}, {"beta", c.controller.reward.beta}};
  j["policy"] = {{"epsilon", c.policy.epsilon},
                 {"T_start", c.policy.train_start},
                 {"minibatch_size", c.policy.minibatch_size},
                 {"memory_capacity", c.policy.memory_capacity},
                 {"learning_rate", c.policy.learning_rate},
                 {"optimizer", std::string(to_string(c.policy.optimizer))},
                 {"gradient_steps", c.policy.gradient_steps},
                 {"target_sync_interval", c.policy.target_sync_interval},
                 {"pooled_bootstrap", c.policy.pooled_bootstrap},
                 {"hidden", c.hidden}};
  j["controller"] = {{"p_min", c.controller.p_min},
                     {"epsilon_retrain", c.controller.epsilon_retrain},
                     {"retrain_min_steps", c.controller.retrain_min_steps},
                     {"retrain_train_start", c.controller.retrain_train_start},
                     {"concurrent_uploads", c.controller.concurrent_uploads}};
  ordered_json b;
  b["kind"] = c.backend.kind;
  if (c.backend.kind == "http") {
    b["url"] = c.backend.http.url;
    b["headers"] = c.backend.http.headers;
    b["label_path"] = c.backend.http.label_json_path;
    b["timeout_ms"] = c.backend.http.timeout_ms;
    b["min_interval_ms"] = c.backend.http.min_interval_ms;
    b["retries"] = c.backend.http.retries;
    b["backoff_ms"] = c.backend.http.backoff_ms;
    b["content_type"] = c.backend.http.content_type;
  } else {
    b["oracle"] = c.backend.oracles;
  }
  j["backend"] = b;
  return j.dump(2) + "\n";
}

std::unique_ptr<VisionBackend> make_backend(const RunConfig& config) {
  if (config.backend.kind == "http") {
    if (config.backend.http.url.empty()) fail("backend.url is required for the http backend");
    return http_adapter(config.backend.http);
  }
  if (config.backend.kind == "oracle") {
    if (config.backend.oracles.empty()) fail("backend.oracle must name at least one oracle spec file");
    std::vector<OracleSpec> specs;
    for (const auto& path : config.backend.oracles) specs.push_back(load_oracle_spec(path));
    return std::make_unique<SimulatedOracle>(merge_oracle_specs(specs));
  }
  fail("backend.kind must be 'oracle' or 'http'");
}

SceneryStream make_stream(const RunConfig& config) {
  if (config.manifests.empty()) fail("no manifest given");
  std::vector<std::filesystem::path> paths(config.manifests.begin(), config.manifests.end());
  SceneryStream stream = SceneryStream::from_manifests(paths);
  if (config.shuffle) stream.shuffle_within_sceneries(config.seed);
  return stream;
}

std::shared_ptr<const FeatureExtractor> make_configured_extractor(const RunConfig& config) {
  return make_extractor(config.extractor);
}

}  // namespace qualgate
