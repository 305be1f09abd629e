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

#ifndef QUALGATE_METRICS_HPP_
#define QUALGATE_METRICS_HPP_

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "qualgate/codec.hpp"

namespace qualgate {

// Labels returned by a vision backend, highest confidence first. An empty
// list is a legal answer ("nothing recognized").
struct PredictionResult {
  std::vector<std::string> labels;
  // Quality of the upload this answer came from; reference uploads set
  // is_reference as well.
  std::optional<QualityLevel> source_quality;
  bool is_reference = false;
};

inline constexpr std::size_t kTopK = 5;

// Trimmed, lower-cased form used for label comparison.
std::string normalize_label(const std::string& label);

// 1 when any of the first five compressed labels equals any reference label
// (after normalize_label), else 0. An empty reference list scores 0.
int accuracy(const PredictionResult& compressed, const PredictionResult& reference);

struct RewardParams {
  double alpha = 1.0;
  double beta = 0.0;

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

// Throws kConfigError unless alpha > 0 and both values are finite.
void validate(const RewardParams& params);

// alpha * A - delta_s + beta
double reward(double delta_s, int accuracy_value, const RewardParams& params);

// Bounded FIFO of the most recent samples plus the mean of the first
// capacity() samples seen since the last clear(), which is frozen once that
// many have arrived.
class RollingWindow {
 public:
  explicit RollingWindow(std::size_t capacity);

  void push(double value);
  void clear();

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return samples_.size(); }
  // Samples pushed since the last clear().
  std::size_t total() const { return total_; }
  const std::deque<double>& samples() const { return samples_; }
  std::optional<double> earliest_mean() const { return earliest_mean_; }

 private:
  std::size_t capacity_;
  std::size_t total_ = 0;
  std::deque<double> samples_;
  double earliest_sum_ = 0.0;
  std::optional<double> earliest_mean_;
};

// Mean of the last n samples when N >= n, otherwise the running mean of the
// N samples available. Throws kEmptyWindow when nothing was recorded.
double recent_mean(const RollingWindow& window, std::size_t total_steps);

inline constexpr double kDefaultPestFloor = 0.05;

// clamp(p_est + omega * grad, p_min, 1). With omega < 0 a falling accuracy
// trend raises the estimation probability.
double update_p_est(double p_est, double grad, double omega, double p_min = kDefaultPestFloor);

}  // namespace qualgate

#endif  // QUALGATE_METRICS_HPP_
