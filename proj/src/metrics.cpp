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

#include "qualgate/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "qualgate/error.hpp"

namespace qualgate {

std::string normalize_label(const std::string& label) {
  auto begin = label.begin();
  auto end = label.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  std::string out(begin, end);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int accuracy(const PredictionResult& compressed, const PredictionResult& reference) {
  const std::size_t top = std::min(kTopK, compressed.labels.size());
  for (std::size_t j = 0; j < top; ++j) {
    const std::string l = normalize_label(compressed.labels[j]);
    for (const auto& g : reference.labels) {
      if (l == normalize_label(g)) return 1;
    }
  }
  return 0;
}

void validate(const RewardParams& params) {
  if (!std::isfinite(params.alpha) || !std::isfinite(params.beta) || params.alpha <= 0.0) {
    throw Error(ErrorCode::kConfigError, "reward params need finite alpha > 0 and finite beta");
  }
}

double reward(double delta_s, int accuracy_value, const RewardParams& params) {
  return params.alpha * accuracy_value - delta_s + params.beta;
}

RollingWindow::RollingWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kConfigError, "rolling window capacity must be positive");
}

void RollingWindow::push(double value) {
  samples_.push_back(value);
  if (samples_.size() > capacity_) samples_.pop_front();
  ++total_;
  if (!earliest_mean_) {
    earliest_sum_ += value;
    if (total_ == capacity_) earliest_mean_ = earliest_sum_ / static_cast<double>(capacity_);
  }
}

void RollingWindow::clear() {
  samples_.clear();
  total_ = 0;
  earliest_sum_ = 0.0;
  earliest_mean_.reset();
}

double recent_mean(const RollingWindow& window, std::size_t total_steps) {
  const auto& s = window.samples();
  if (s.empty() || total_steps == 0) {
    throw Error(ErrorCode::kEmptyWindow, "recent_mean needs at least one sample");
  }
  const std::size_t take = std::min({total_steps, window.capacity(), s.size()});
  double sum = 0.0;
  if (total_steps >= window.capacity()) {
    for (std::size_t i = s.size() - take; i < s.size(); ++i) sum += s[i];
  } else {
    for (std::size_t i = 0; i < take; ++i) sum += s[i];
  }
  return sum / static_cast<double>(take);
}

double update_p_est(double p_est, double grad, double omega, double p_min) {
  return std::clamp(p_est + omega * grad, p_min, 1.0);
}

}  // namespace qualgate
