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

#ifndef QUALGATE_CONTROLLER_HPP_
#define QUALGATE_CONTROLLER_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "qualgate/agent.hpp"
#include "qualgate/backend.hpp"
#include "qualgate/features.hpp"
#include "qualgate/metrics.hpp"
#include "qualgate/stream.hpp"

namespace qualgate {

enum class Mode { kInference, kEstimate, kRetrain };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);

// Inputs of the mode-switching rule. Absent values disable the edge that
// needs them: no drift check before the accuracy baseline is frozen, no
// retrain exit before enough rewards are in.
struct SwitchInputs {
  Mode mode = Mode::kInference;
  double xi = 1.0;
  double p_est = 0.0;
  std::optional<double> recent_accuracy;    // mean of the last n accuracies
  std::optional<double> baseline_accuracy;  // A_0
  std::optional<double> recent_reward;      // mean of the last n rewards
  double r_th = 0.45;
};

// The seven edges of the inference/estimate/retrain graph:
//   inference --xi >  p_est--> inference    inference --xi <= p_est--> estimate
//   estimate  --Abar <  A_0 --> retrain
//   estimate  --xi <= p_est--> estimate     estimate  --xi >  p_est--> inference
//   retrain   --rbar >  r_th--> inference   retrain   --rbar <= r_th--> retrain
Mode next_mode(const SwitchInputs& in);

struct ControllerParams {
  double p_0 = 0.2;
  double omega = -3.0;
  double p_min = kDefaultPestFloor;
  std::size_t n = 10;
  double r_th = 0.45;
  double epsilon_retrain = 0.5;
  // Retrain cannot end before this many retrain steps (and never before n).
  int retrain_min_steps = 100;
  // Retrain trains every T steps once this many retrain steps have run.
  int retrain_train_start = 10;
  bool concurrent_uploads = true;
  RewardParams reward;

  friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

void validate(const ControllerParams& params);

// One processed image. Optional fields are absent when not measured in that
// mode (inference uploads only the compressed image).
struct StepRecord {
  std::uint64_t step = 0;
  Mode mode = Mode::kInference;
  std::string phase;  // "train" for offline training, else the mode name
  int quality = 0;
  std::size_t size_c = 0;
  std::optional<std::size_t> size_ref;
  std::optional<double> delta_s;
  std::optional<int> accuracy;
  std::optional<double> reward;
  double p_est = 0.0;
  std::optional<double> loss;
  std::string source_id;
  std::string scenery;
  int uploads = 0;
  std::size_t uploaded_bytes = 0;
  double epsilon = 0.0;
  // Wall-clock cost of feature extraction + action choice. Kept under a
  // separate "timing" key so determinism checks can drop it.
  double decide_us = 0.0;
  // Round trip of the compressed upload, also under "timing".
  double backend_ms = 0.0;
};

// One JSON object per line; keys in a fixed order. Timing is written under
// "timing" only when include_timing is set.
std::string to_json_line(const StepRecord& record, bool include_timing = true);
// Throws kConfigError with a description on malformed input.
StepRecord parse_step_record(const std::string& line);

// Dual-upload measurement shared by offline training, estimate and retrain.
struct Measurement {
  CompressedImage compressed;
  CompressedImage reference;
  PredictionResult compressed_prediction;
  PredictionResult reference_prediction;
  int accuracy = 0;
  double delta_s = 0.0;
  double reward = 0.0;
  double compressed_ms = 0.0;  // round trip of the compressed upload
};

Measurement measure(VisionBackend& backend, const Raster& image, const std::string& source_id,
                    QualityLevel quality, const RewardParams& reward_params, bool concurrent);

// Transmission time of avg_size_bytes over the link plus inference time.
// Sizes are bytes, bandwidth bits per second, result milliseconds.
double estimated_latency(double avg_size_bytes, double bandwidth_bits_per_s, double inference_ms);

struct ControllerState {
  Mode mode = Mode::kInference;
  double p_est = 0.2;
  RollingWindow accuracy_window{10};
  RollingWindow reward_window{10};
  std::optional<double> last_recent_accuracy;
  std::uint64_t step = 0;
  std::uint64_t retrain_steps = 0;
  std::uint64_t retrains = 0;
  double r_th = 0.45;
};

struct StepOutcome {
  PredictionResult result;  // what the caller receives
  StepRecord record;
};

// The online decision loop for one (backend, stream) pair. Not thread-safe;
// the two uploads of an estimate/retrain step may run concurrently.
class Controller {
 public:
  Controller(ControllerParams params, std::shared_ptr<const FeatureExtractor> extractor, Agent& agent,
             VisionBackend& backend, std::uint64_t seed, Mode initial_mode = Mode::kInference);

  // Processes one image. Backend failures propagate and leave the
  // controller state untouched; in inference a transient failure is
  // retried once first.
  StepOutcome process(const Raster& image, const std::string& source_id, const std::string& scenery = {});

  const ControllerState& state() const { return state_; }
  const ControllerParams& params() const { return params_; }
  const Agent& agent() const { return agent_; }

  // Stores a transition still waiting for its successor state (call at end
  // of stream, using the last state as its own successor).
  void finish();

 private:
  StepOutcome run_inference(const FeatureVector& features, int action, const Raster& image,
                            const std::string& source_id);
  StepOutcome run_measured(const FeatureVector& features, int action, const Raster& image,
                           const std::string& source_id);
  PredictionResult reference_for(const CompressedImage& reference);
  void enter_retrain();
  void leave_retrain();

  ControllerParams params_;
  std::shared_ptr<const FeatureExtractor> extractor_;
  Agent& agent_;
  VisionBackend& backend_;
  Rng rng_;
  ControllerState state_;
  std::optional<Transition> pending_;
  // Reference answer for the image currently being processed, reused if a
  // step is retried after a failure.
  std::optional<std::pair<std::string, PredictionResult>> reference_cache_;
};

struct TrainingSummary {
  std::uint64_t steps = 0;
  std::optional<double> recent_accuracy;
  std::optional<double> recent_reward;
  double mean_delta_s = 0.0;
  double mean_upload_overhead = 0.0;  // uploaded bytes / reference bytes
  std::uint64_t train_steps = 0;
};

// Offline training for the given number of interactions: epsilon-greedy action, dual
// upload, reward, store (s, c, r, s'), and a train step every T steps from
// T_start on. The stream is replayed from the start when exhausted.
TrainingSummary train_agent(Agent& agent, const FeatureExtractor& extractor, VisionBackend& backend,
                            SceneryStream& stream, std::uint64_t steps, const RewardParams& reward,
                            std::size_t window, bool concurrent_uploads,
                            const std::function<void(const StepRecord&)>& sink = {});

}  // namespace qualgate

#endif  // QUALGATE_CONTROLLER_HPP_
