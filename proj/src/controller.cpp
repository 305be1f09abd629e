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

#include "qualgate/controller.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "json.hpp"
#include "qualgate/error.hpp"

namespace qualgate {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kInference: return "inference";
    case Mode::kEstimate: return "estimate";
    case Mode::kRetrain: return "retrain";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view name) {
  if (name == "inference") return Mode::kInference;
  if (name == "estimate") return Mode::kEstimate;
  if (name == "retrain" || name == "train") return Mode::kRetrain;
  throw Error(ErrorCode::kConfigError, "unknown mode '" + std::string(name) + "'");
}

Mode next_mode(const SwitchInputs& in) {
  switch (in.mode) {
    case Mode::kInference:
      return in.xi <= in.p_est ? Mode::kEstimate : Mode::kInference;
    case Mode::kEstimate:
      if (in.recent_accuracy && in.baseline_accuracy && *in.recent_accuracy < *in.baseline_accuracy) {
        return Mode::kRetrain;
      }
      return in.xi <= in.p_est ? Mode::kEstimate : Mode::kInference;
    case Mode::kRetrain:
      return (in.recent_reward && *in.recent_reward > in.r_th) ? Mode::kInference : Mode::kRetrain;
  }
  return in.mode;
}

void validate(const ControllerParams& p) {
  validate(p.reward);
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, what); };
  if (!(p.p_min >= 0.0 && p.p_min <= 1.0)) fail("p_min must lie in [0, 1]");
  if (!(p.p_0 >= p.p_min && p.p_0 <= 1.0)) fail("p_0 must lie in [p_min, 1]");
  if (!std::isfinite(p.omega)) fail("omega must be finite");
  if (p.n == 0) fail("window n must be positive");
  if (!std::isfinite(p.r_th)) fail("r_th must be finite");
  if (!(p.epsilon_retrain >= 0.0 && p.epsilon_retrain <= 1.0)) fail("epsilon_retrain must lie in [0, 1]");
  if (p.retrain_min_steps < 0 || p.retrain_train_start < 0) fail("retrain step counts must be >= 0");
}

namespace {

template <typename T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string to_json_line(const StepRecord& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["mode"] = r.phase.empty() ? std::string(to_string(r.mode)) : r.phase;
  j["quality"] = r.quality;
  j["size_c"] = r.size_c;
  put_optional(j, "size_ref", r.size_ref);
  put_optional(j, "delta_s", r.delta_s);
  put_optional(j, "accuracy", r.accuracy);
  put_optional(j, "reward", r.reward);
  j["p_est"] = r.p_est;
  put_optional(j, "loss", r.loss);
  j["source_id"] = r.source_id;
  j["scenery"] = r.scenery;
  j["uploads"] = r.uploads;
  j["uploaded_bytes"] = r.uploaded_bytes;
  j["epsilon"] = r.epsilon;
  if (include_timing) j["timing"] = {{"decide_us", r.decide_us}, {"backend_ms", r.backend_ms}};
  return j.dump();
}

StepRecord parse_step_record(const std::string& line) {
  StepRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.step = j.at("step").get<std::uint64_t>();
    r.phase = j.at("mode").get<std::string>();
    r.mode = mode_from_string(r.phase);
    if (r.phase != "train") r.phase.clear();
    r.quality = j.at("quality").get<int>();
    QualityLevel::from_value(r.quality);
    r.size_c = j.at("size_c").get<std::size_t>();
    r.size_ref = get_optional<std::size_t>(j, "size_ref");
    r.delta_s = get_optional<double>(j, "delta_s");
    r.accuracy = get_optional<int>(j, "accuracy");
    r.reward = get_optional<double>(j, "reward");
    r.p_est = j.at("p_est").get<double>();
    r.loss = get_optional<double>(j, "loss");
    r.source_id = j.value("source_id", std::string{});
    r.scenery = j.value("scenery", std::string{});
    r.uploads = j.value("uploads", 1);
    r.uploaded_bytes = j.value("uploaded_bytes", r.size_c);
    r.epsilon = j.value("epsilon", 0.0);
    if (j.contains("timing")) {
      r.decide_us = j.at("timing").value("decide_us", 0.0);
      r.backend_ms = j.at("timing").value("backend_ms", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return r;
}

Measurement measure(VisionBackend& backend, const Raster& image, const std::string& source_id,
                    QualityLevel quality, const RewardParams& reward_params, bool concurrent) {
  Measurement m;
  InvocationRecord timing;
  m.compressed = compress(image, quality, source_id);
  m.reference = compress(image, reference_quality(), source_id);
  if (concurrent) {
    auto ref = std::async(std::launch::async, [&] { return invoke(backend, m.reference); });
    try {
      m.compressed_prediction = invoke(backend, m.compressed, &timing);
    } catch (...) {
      ref.wait();
      throw;
    }
    m.reference_prediction = ref.get();
  } else {
    m.compressed_prediction = invoke(backend, m.compressed, &timing);
    m.reference_prediction = invoke(backend, m.reference);
  }
  m.compressed_ms = timing.latency_ms;
  m.reference_prediction.is_reference = true;
  m.accuracy = accuracy(m.compressed_prediction, m.reference_prediction);
  m.delta_s = compression_ratio(m.compressed, m.reference);
  m.reward = reward(m.delta_s, m.accuracy, reward_params);
  return m;
}

double estimated_latency(double avg_size_bytes, double bandwidth_bits_per_s, double inference_ms) {
  if (!(bandwidth_bits_per_s > 0.0)) throw Error(ErrorCode::kConfigError, "bandwidth must be positive");
  return 8.0 * avg_size_bytes / bandwidth_bits_per_s * 1000.0 + inference_ms;
}

Controller::Controller(ControllerParams params, std::shared_ptr<const FeatureExtractor> extractor,
                       Agent& agent, VisionBackend& backend, std::uint64_t seed, Mode initial_mode)
    : params_(params),
      extractor_(std::move(extractor)),
      agent_(agent),
      backend_(backend),
      rng_(mix64(seed ^ 0xC0A7B011ULL)) {
  validate(params_);
  if (!(extractor_->descriptor() == agent_.descriptor())) {
    throw Error(ErrorCode::kExtractorMismatch, "agent was built for a different feature extractor");
  }
  state_.mode = initial_mode;
  state_.p_est = params_.p_0;
  state_.accuracy_window = RollingWindow(params_.n);
  state_.reward_window = RollingWindow(params_.n);
  state_.r_th = params_.r_th;
  if (initial_mode == Mode::kRetrain) enter_retrain();
}

void Controller::finish() {
  if (pending_) {
    pending_->next_state = pending_->state;
    agent_.store(std::move(*pending_));
    pending_.reset();
  }
}

PredictionResult Controller::reference_for(const CompressedImage& reference) {
  if (reference_cache_ && reference_cache_->first == reference.source_id) return reference_cache_->second;
  auto result = invoke(backend_, reference);
  result.is_reference = true;
  reference_cache_.emplace(reference.source_id, result);
  return result;
}

void Controller::enter_retrain() {
  state_.mode = Mode::kRetrain;
  state_.retrain_steps = 0;
  state_.reward_window.clear();
  agent_.policy().epsilon = params_.epsilon_retrain;
  ++state_.retrains;
}

void Controller::leave_retrain() {
  state_.mode = Mode::kInference;
  agent_.memory().flush();
  pending_.reset();
  state_.accuracy_window.clear();
  state_.reward_window.clear();
  state_.last_recent_accuracy.reset();
  state_.p_est = params_.p_0;
}

StepOutcome Controller::process(const Raster& image, const std::string& source_id, const std::string& scenery) {
  if (reference_cache_ && reference_cache_->first != source_id) reference_cache_.reset();

  const auto t0 = std::chrono::steady_clock::now();
  const FeatureVector features = extractor_->extract(image);
  // Retrain explores; the deployed policy is greedy.
  const Rng agent_rng_snapshot = agent_.rng();
  const int action = state_.mode == Mode::kRetrain ? agent_.act(features) : agent_.greedy(features);
  const double decide_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();

  StepOutcome outcome;
  try {
    outcome = state_.mode == Mode::kInference ? run_inference(features, action, image, source_id)
                                              : run_measured(features, action, image, source_id);
  } catch (const Error&) {
    agent_.rng() = agent_rng_snapshot;
    throw;
  }
  outcome.record.scenery = scenery;
  outcome.record.decide_us = decide_us;
  return outcome;
}

StepOutcome Controller::run_inference(const FeatureVector& features, int action, const Raster& image,
                                      const std::string& source_id) {
  const QualityLevel quality = QualityLevel::from_index(action);
  const CompressedImage compressed = compress(image, quality, source_id);
  PredictionResult result;
  InvocationRecord timing;
  try {
    result = invoke(backend_, compressed, &timing);
  } catch (const Error& e) {
    if (!e.retryable()) throw;
    result = invoke(backend_, compressed, &timing);
  }
  // Committed: the upload succeeded.
  ++state_.step;
  if (pending_) {
    pending_->next_state = features;
    agent_.store(std::move(*pending_));
    pending_.reset();
  }

  StepRecord rec;
  rec.step = state_.step;
  rec.mode = Mode::kInference;
  rec.quality = quality.value();
  rec.size_c = compressed.size_bytes();
  // Local-only reference encoding: sizes the baseline, never uploaded.
  const CompressedImage reference = compress(image, reference_quality(), source_id);
  rec.size_ref = reference.size_bytes();
  rec.delta_s = compression_ratio(compressed, reference);
  rec.p_est = state_.p_est;
  rec.source_id = source_id;
  rec.uploads = 1;
  rec.uploaded_bytes = compressed.size_bytes();
  rec.epsilon = agent_.policy().epsilon;
  rec.backend_ms = timing.latency_ms;

  SwitchInputs in;
  in.mode = Mode::kInference;
  in.xi = rng_.uniform();
  in.p_est = state_.p_est;
  in.r_th = params_.r_th;
  state_.mode = next_mode(in);
  return {std::move(result), std::move(rec)};
}

StepOutcome Controller::run_measured(const FeatureVector& features, int action, const Raster& image,
                                     const std::string& source_id) {
  const QualityLevel quality = QualityLevel::from_index(action);
  Measurement m;
  InvocationRecord timing;
  m.compressed = compress(image, quality, source_id);
  m.reference = compress(image, reference_quality(), source_id);
  if (params_.concurrent_uploads && !(reference_cache_ && reference_cache_->first == source_id)) {
    auto ref = std::async(std::launch::async, [&] { return reference_for(m.reference); });
    try {
      m.compressed_prediction = invoke(backend_, m.compressed, &timing);
    } catch (...) {
      ref.wait();
      throw;
    }
    m.reference_prediction = ref.get();
  } else {
    m.reference_prediction = reference_for(m.reference);
    m.compressed_prediction = invoke(backend_, m.compressed, &timing);
  }
  m.compressed_ms = timing.latency_ms;
  m.accuracy = accuracy(m.compressed_prediction, m.reference_prediction);
  m.delta_s = compression_ratio(m.compressed, m.reference);
  m.reward = reward(m.delta_s, m.accuracy, params_.reward);

  // Committed from here on.
  const Mode mode = state_.mode;
  ++state_.step;
  if (pending_) {
    pending_->next_state = features;
    agent_.store(std::move(*pending_));
    pending_.reset();
  }
  Transition t;
  t.state = features;
  t.action = action;
  t.reward = m.reward;
  t.accuracy = m.accuracy;
  t.step = state_.step;
  pending_ = std::move(t);

  StepRecord rec;
  rec.step = state_.step;
  rec.mode = mode;
  rec.quality = quality.value();
  rec.size_c = m.compressed.size_bytes();
  rec.size_ref = m.reference.size_bytes();
  rec.delta_s = m.delta_s;
  rec.reward = m.reward;
  rec.source_id = source_id;
  rec.uploads = 2;
  rec.uploaded_bytes = m.compressed.size_bytes() + m.reference.size_bytes();
  rec.backend_ms = m.compressed_ms;

  SwitchInputs in;
  in.mode = mode;
  in.r_th = params_.r_th;

  if (mode == Mode::kEstimate) {
    state_.accuracy_window.push(m.accuracy);
    const double recent = recent_mean(state_.accuracy_window, state_.accuracy_window.total());
    const double grad = state_.last_recent_accuracy ? recent - *state_.last_recent_accuracy : 0.0;
    state_.last_recent_accuracy = recent;
    state_.p_est = update_p_est(state_.p_est, grad, params_.omega, params_.p_min);
    rec.accuracy = m.accuracy;
    rec.p_est = state_.p_est;
    rec.epsilon = agent_.policy().epsilon;

    in.xi = rng_.uniform();
    in.p_est = state_.p_est;
    in.recent_accuracy = recent;
    in.baseline_accuracy = state_.accuracy_window.earliest_mean();
    const Mode next = next_mode(in);
    if (next == Mode::kRetrain) {
      enter_retrain();
    } else {
      state_.mode = next;
    }
  } else {
    ++state_.retrain_steps;
    state_.reward_window.push(m.reward);
    // Retrain runs its own training clock from the moment it starts.
    const auto& policy = agent_.policy();
    if (policy.train_interval > 0 && state_.retrain_steps % static_cast<std::uint64_t>(policy.train_interval) == 0 &&
        state_.retrain_steps >= static_cast<std::uint64_t>(params_.retrain_train_start) &&
        agent_.memory().size() >= policy.minibatch_size) {
      rec.loss = agent_.train_step();
    }
    // Caller gets the reference answer, so delivered accuracy and p_est
    // read as 1 while retraining.
    rec.accuracy = 1;
    rec.p_est = 1.0;
    rec.epsilon = agent_.policy().epsilon;

    const auto min_steps = std::max<std::uint64_t>(params_.n, static_cast<std::uint64_t>(params_.retrain_min_steps));
    if (state_.retrain_steps >= min_steps) {
      in.recent_reward = recent_mean(state_.reward_window, state_.reward_window.total());
    }
    if (next_mode(in) == Mode::kInference) leave_retrain();
  }
  return {std::move(m.reference_prediction), std::move(rec)};
}

TrainingSummary train_agent(Agent& agent, const FeatureExtractor& extractor, VisionBackend& backend,
                            SceneryStream& stream, std::uint64_t steps, const RewardParams& reward_params,
                            std::size_t window, bool concurrent_uploads,
                            const std::function<void(const StepRecord&)>& sink) {
  TrainingSummary summary;
  if (steps == 0) return summary;
  if (stream.size() == 0) throw Error(ErrorCode::kConfigError, "training stream is empty");
  validate(reward_params);

  auto next_item = [&stream]() {
    auto item = stream.next_image();
    if (!item) {
      stream.rewind();
      item = stream.next_image();
    }
    return std::move(*item);
  };

  RollingWindow accuracy_window(window);
  RollingWindow reward_window(window);
  double delta_sum = 0.0;
  double uploaded = 0.0;
  double reference_bytes = 0.0;

  StreamItem current = next_item();
  FeatureVector current_features = extractor.extract(current.image);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    const int action = agent.act(current_features);
    const double decide_us =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
    const Measurement m = measure(backend, current.image, current.source_id, QualityLevel::from_index(action),
                                  reward_params, concurrent_uploads);

    // Look ahead so the stored transition carries the true successor state.
    StreamItem next = t < steps ? next_item() : current;
    FeatureVector next_features = t < steps ? extractor.extract(next.image) : current_features;

    Transition tr;
    tr.state = current_features;
    tr.action = action;
    tr.reward = m.reward;
    tr.next_state = next_features;
    tr.accuracy = m.accuracy;
    tr.step = t;
    agent.store(std::move(tr));

    std::optional<double> loss;
    if (should_train(t, agent.policy()) && agent.memory().size() >= agent.policy().minibatch_size) {
      loss = agent.train_step();
    }

    accuracy_window.push(m.accuracy);
    reward_window.push(m.reward);
    delta_sum += m.delta_s;
    uploaded += static_cast<double>(m.compressed.size_bytes() + m.reference.size_bytes());
    reference_bytes += static_cast<double>(m.reference.size_bytes());

    if (sink) {
      StepRecord rec;
      rec.step = t;
      rec.mode = Mode::kRetrain;
      rec.phase = "train";
      rec.quality = m.compressed.quality.value();
      rec.size_c = m.compressed.size_bytes();
      rec.size_ref = m.reference.size_bytes();
      rec.delta_s = m.delta_s;
      rec.accuracy = m.accuracy;
      rec.reward = m.reward;
      rec.p_est = 1.0;
      rec.loss = loss;
      rec.source_id = current.source_id;
      rec.scenery = current.scenery_id;
      rec.uploads = 2;
      rec.uploaded_bytes = m.compressed.size_bytes() + m.reference.size_bytes();
      rec.epsilon = agent.policy().epsilon;
      rec.decide_us = decide_us;
      rec.backend_ms = m.compressed_ms;
      sink(rec);
    }
    current = std::move(next);
    current_features = std::move(next_features);
  }
  summary.steps = steps;
  summary.recent_accuracy = recent_mean(accuracy_window, accuracy_window.total());
  summary.recent_reward = recent_mean(reward_window, reward_window.total());
  summary.mean_delta_s = delta_sum / static_cast<double>(steps);
  summary.mean_upload_overhead = uploaded / reference_bytes;
  summary.train_steps = agent.train_steps();
  return summary;
}

}  // namespace qualgate
