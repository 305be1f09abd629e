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

#include <algorithm>
#include <cctype>
#include <chrono>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qualgate/backend.hpp"
#include "qualgate/error.hpp"

namespace qualgate {

std::vector<std::string> extract_labels(const std::string& json_text, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kBackendRejected, std::string("malformed JSON response: ") + e.what());
  }
  std::vector<std::string> segments;
  std::stringstream ss(path);
  for (std::string seg; std::getline(ss, seg, '.');) {
    if (!seg.empty()) segments.push_back(seg);
  }

  std::vector<const nlohmann::json*> frontier{&doc};
  for (const auto& seg : segments) {
    std::vector<const nlohmann::json*> next;
    for (const auto* node : frontier) {
      if (seg == "*") {
        if (!node->is_array()) {
          throw Error(ErrorCode::kBackendRejected, "label path '" + path + "': '*' applied to a non-array");
        }
        for (const auto& child : *node) next.push_back(&child);
      } else if (node->is_object() && node->contains(seg)) {
        next.push_back(&(*node)[seg]);
      } else if (node->is_array() && std::all_of(seg.begin(), seg.end(), ::isdigit)) {
        const auto idx = std::stoul(seg);
        if (idx < node->size()) next.push_back(&(*node)[idx]);
      } else {
        throw Error(ErrorCode::kBackendRejected, "label path '" + path + "': missing field '" + seg + "'");
      }
    }
    frontier = std::move(next);
  }

  std::vector<std::string> labels;
  for (const auto* node : frontier) {
    if (node->is_string()) {
      labels.push_back(node->get<std::string>());
    } else if (node->is_array()) {
      for (const auto& item : *node) {
        if (!item.is_string()) {
          throw Error(ErrorCode::kBackendRejected, "label path '" + path + "' reaches a non-string");
        }
        labels.push_back(item.get<std::string>());
      }
    } else {
      throw Error(ErrorCode::kBackendRejected, "label path '" + path + "' reaches a non-string");
    }
  }
  return labels;
}

namespace {

class HttpBackend final : public VisionBackend {
 public:
  HttpBackend(HttpBackendConfig config, std::string origin, std::string path)
      : config_(std::move(config)), origin_(std::move(origin)), path_(std::move(path)) {}

  std::string name() const override { return "http:" + config_.url; }

  PredictionResult classify(const CompressedImage& payload) override {
    int backoff = config_.backoff_ms;
    for (int attempt = 0;; ++attempt) {
      try {
        return attempt_once(payload);
      } catch (const Error& e) {
        if (!e.retryable() || attempt >= config_.retries) throw;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }

 private:
  void throttle() {
    if (config_.min_interval_ms <= 0) return;
    std::unique_lock lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    const auto earliest = last_request_ + std::chrono::milliseconds(config_.min_interval_ms);
    if (now < earliest) std::this_thread::sleep_until(earliest);
    last_request_ = std::chrono::steady_clock::now();
  }

  PredictionResult attempt_once(const CompressedImage& payload) {
    throttle();
    httplib::Client client(origin_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    for (const auto& [k, v] : config_.headers) headers.emplace(k, v);

    const auto start = std::chrono::steady_clock::now();
    auto response = client.Post(path_, headers, reinterpret_cast<const char*>(payload.payload.data()),
                                payload.payload.size(), config_.content_type);
    if (!response) {
      const auto err = response.error();
      const auto elapsed = std::chrono::steady_clock::now() - start;
      if (err == httplib::Error::ConnectionTimeout ||
          (err == httplib::Error::Read && elapsed >= timeout)) {
        throw Error(ErrorCode::kTimeout, config_.url + ": " + httplib::to_string(err));
      }
      throw Error(ErrorCode::kBackendUnavailable, config_.url + ": " + httplib::to_string(err));
    }
    const int status = response->status;
    if (status == 429 || status >= 500) {
      throw Error(ErrorCode::kBackendUnavailable, config_.url + ": HTTP " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
      throw Error(ErrorCode::kBackendRejected, config_.url + ": HTTP " + std::to_string(status));
    }
    PredictionResult result;
    result.labels = extract_labels(response->body, config_.label_json_path);
    return result;
  }

  HttpBackendConfig config_;
  std::string origin_;
  std::string path_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

}  // namespace

std::unique_ptr<VisionBackend> http_adapter(const HttpBackendConfig& config) {
  static const std::regex kUrl(R"(^(https?)://([^/:]+)(:(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config.url, m, kUrl)) {
    throw Error(ErrorCode::kConfigError, "malformed backend URL '" + config.url + "'");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (m[1] == "https") {
    throw Error(ErrorCode::kConfigError, "this build has no TLS support; https URLs are unavailable");
  }
#endif
  if (config.timeout_ms <= 0 || config.retries < 0 || config.backoff_ms < 0) {
    throw Error(ErrorCode::kConfigError, "http backend timeouts and retry counts must be positive");
  }
  if (config.label_json_path.empty()) {
    throw Error(ErrorCode::kConfigError, "label_json_path must not be empty");
  }
  std::string origin = std::string(m[1]) + "://" + std::string(m[2]);
  if (m[4].matched) origin += ":" + std::string(m[4]);
  std::string path = m[5].matched ? std::string(m[5]) : "/";
  return std::make_unique<HttpBackend>(config, std::move(origin), std::move(path));
}

}  // namespace qualgate
