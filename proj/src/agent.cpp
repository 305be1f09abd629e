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

#include "qualgate/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qualgate/error.hpp"
#include "qualgate/simd/kernels.hpp"

namespace qualgate {

void validate(const Transition& t) {
  if (t.action < 0 || t.action >= kNumQualityLevels) {
    throw Error(ErrorCode::kUnsupportedQuality, "transition action outside [0, 9]");
  }
  if (!std::isfinite(t.reward)) throw Error(ErrorCode::kInternal, "transition reward is not finite");
  if (t.state.dim() != t.next_state.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and next_state dimensions differ");
  }
  if (t.accuracy && *t.accuracy != 0 && *t.accuracy != 1) {
    throw Error(ErrorCode::kInternal, "transition accuracy must be 0 or 1");
  }
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kConfigError, "replay memory capacity must be positive");
}

void ReplayMemory::store(Transition t) {
  validate(t);
  entries_.push_back(std::move(t));
  while (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count, Rng& rng) const {
  if (count > entries_.size()) {
    throw Error(ErrorCode::kInsufficientMemory, "minibatch of " + std::to_string(count) +
                                                    " from memory of " + std::to_string(entries_.size()));
  }
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> pool(entries_.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorCode::kConfigError, "unknown optimizer '" + name + "'");
}

PolicyState decay_epsilon(PolicyState policy) {
  const double next = policy.mu_dec * policy.epsilon;
  policy.epsilon = next > policy.epsilon_min ? next : policy.epsilon_min;
  return policy;
}

bool should_train(std::uint64_t step, const PolicyState& policy) {
  return policy.train_interval > 0 && step % static_cast<std::uint64_t>(policy.train_interval) == 0 &&
         step >= static_cast<std::uint64_t>(policy.train_start);
}

QNetwork::QNetwork(std::size_t input_dim, std::vector<std::size_t> hidden, std::uint64_t seed) {
  if (input_dim == 0) throw Error(ErrorCode::kConfigError, "Q network input dimension must be positive");
  Rng rng(mix64(seed ^ 0x51C0FFEEULL));
  std::size_t in = input_dim;
  hidden.push_back(kNumQualityLevels);
  for (std::size_t out : hidden) {
    if (out == 0) throw Error(ErrorCode::kConfigError, "hidden layer width must be positive");
    DenseLayer layer;
    layer.inputs = in;
    layer.outputs = out;
    layer.weights.resize(in * out);
    layer.bias.assign(out, 0.0);
    // He-uniform initialization.
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layers_.push_back(std::move(layer));
    in = out;
  }
}

std::vector<std::size_t> QNetwork::hidden_widths() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) out.push_back(layers_[i].outputs);
  return out;
}

namespace {

// Activations of every layer for one input; acts[0] is the input itself,
// pre[i] the pre-activation of layer i.
struct ForwardCache {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> pre;
};

void forward(const std::vector<DenseLayer>& layers, std::span<const double> input, ForwardCache& cache) {
  cache.acts.resize(layers.size() + 1);
  cache.pre.resize(layers.size());
  cache.acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    auto& z = cache.pre[l];
    z.resize(layer.outputs);
    simd::gemv(layer.weights, layer.outputs, layer.inputs, cache.acts[l], layer.bias, z);
    auto& a = cache.acts[l + 1];
    a = z;
    if (l + 1 < layers.size()) {
      for (auto& v : a) v = v > 0.0 ? v : 0.0;
    }
  }
}

void check_dim(const FeatureVector& state, std::size_t expected) {
  if (state.dim() != expected) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(state.dim()) +
                                                   " but Q network expects " + std::to_string(expected));
  }
}

}  // namespace

ActionValues QNetwork::evaluate(const FeatureVector& state) const {
  check_dim(state, input_dim());
  ForwardCache cache;
  forward(layers_, state.values, cache);
  ActionValues out{};
  std::copy(cache.acts.back().begin(), cache.acts.back().end(), out.begin());
  return out;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> QNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void QNetwork::assign(std::span<const double> params) {
  if (params.size() != parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector length mismatch");
  }
  std::size_t pos = 0;
  for (auto& l : layers_) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.begin());
    pos += l.weights.size();
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.begin());
    pos += l.bias.size();
  }
}

double QNetwork::loss(std::span<const FeatureVector* const> states, std::span<const int> actions,
                      std::span<const double> targets) const {
  double total = 0.0;
  ForwardCache cache;
  for (std::size_t j = 0; j < states.size(); ++j) {
    check_dim(*states[j], input_dim());
    forward(layers_, states[j]->values, cache);
    const double err = targets[j] - cache.acts.back()[static_cast<std::size_t>(actions[j])];
    total += err * err;
  }
  return total / static_cast<double>(states.size());
}

double QNetwork::loss_and_gradient(std::span<const FeatureVector* const> states,
                                   std::span<const int> actions, std::span<const double> targets,
                                   std::vector<double>& gradient) const {
  gradient.assign(parameter_count(), 0.0);
  // Offsets of each layer's weight and bias blocks in the flat vector.
  std::vector<std::size_t> w_off(layers_.size());
  std::vector<std::size_t> b_off(layers_.size());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    w_off[l] = pos;
    pos += layers_[l].weights.size();
    b_off[l] = pos;
    pos += layers_[l].bias.size();
  }

  const double batch = static_cast<double>(states.size());
  double total = 0.0;
  ForwardCache cache;
  std::vector<double> delta;
  std::vector<double> back;
  for (std::size_t j = 0; j < states.size(); ++j) {
    check_dim(*states[j], input_dim());
    forward(layers_, states[j]->values, cache);
    const auto action = static_cast<std::size_t>(actions[j]);
    const double err = targets[j] - cache.acts.back()[action];
    total += err * err;

    delta.assign(kNumQualityLevels, 0.0);
    delta[action] = -2.0 * err / batch;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& layer = layers_[l];
      const auto& input = cache.acts[l];
      for (std::size_t r = 0; r < layer.outputs; ++r) {
        if (delta[r] == 0.0) continue;
        simd::axpy(delta[r], input,
                   std::span<double>(gradient.data() + w_off[l] + r * layer.inputs, layer.inputs));
        gradient[b_off[l] + r] += delta[r];
      }
      if (l == 0) break;
      back.resize(layer.inputs);
      simd::gemv_transposed(layer.weights, layer.outputs, layer.inputs, delta, back);
      const auto& z_prev = cache.pre[l - 1];
      for (std::size_t i = 0; i < back.size(); ++i) {
        if (z_prev[i] <= 0.0) back[i] = 0.0;
      }
      delta.swap(back);
    }
  }
  return total / batch;
}

int greedy_action(const ActionValues& values) {
  int best = 0;
  for (int i = 1; i < kNumQualityLevels; ++i) {
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

int select_action(const QNetwork& q, const FeatureVector& state, const PolicyState& policy, Rng& rng) {
  if (state.dim() != q.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state dim does not match Q network input");
  }
  if (rng.uniform() < policy.epsilon) {
    return static_cast<int>(rng.below(kNumQualityLevels));
  }
  return greedy_action(q.evaluate(state));
}

void Optimizer::reset() {
  m_.clear();
  v_.clear();
  t_ = 0;
}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& gradient) {
  if (kind_ == OptimizerKind::kSgd) {
    simd::axpy(-lr_, gradient, params);
    return;
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * gradient[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * gradient[i] * gradient[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
  }
}

double train_step(QNetwork& q, const ReplayMemory& memory, PolicyState& policy, Rng& rng,
                  Optimizer& optimizer, const QNetwork* target) {
  if (memory.size() < policy.minibatch_size || policy.minibatch_size == 0) {
    throw Error(ErrorCode::kInsufficientMemory,
                "need " + std::to_string(policy.minibatch_size) + " transitions, have " +
                    std::to_string(memory.size()));
  }
  const QNetwork& bootstrap = target != nullptr ? *target : q;
  double first_loss = 0.0;
  for (int step = 0; step < std::max(1, policy.gradient_steps); ++step) {
    const auto indices = memory.sample_indices(policy.minibatch_size, rng);

    std::vector<const FeatureVector*> states;
    std::vector<int> actions;
    std::vector<double> next_values;
    states.reserve(indices.size());
    for (std::size_t idx : indices) {
      const Transition& t = memory[idx];
      const ActionValues next = bootstrap.evaluate(t.next_state);
      next_values.push_back(*std::max_element(next.begin(), next.end()));
      states.push_back(&t.state);
      actions.push_back(t.action);
    }
    if (policy.pooled_bootstrap) {
      const double mean = std::accumulate(next_values.begin(), next_values.end(), 0.0) /
                          static_cast<double>(next_values.size());
      std::fill(next_values.begin(), next_values.end(), mean);
    }
    std::vector<double> targets;
    targets.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
      targets.push_back(memory[indices[k]].reward + policy.gamma * next_values[k]);
    }

    std::vector<double> gradient;
    const double loss = q.loss_and_gradient(states, actions, targets, gradient);
    auto params = q.flatten();
    optimizer.step(params, gradient);
    q.assign(params);
    if (step == 0) first_loss = loss;
  }
  policy = decay_epsilon(policy);
  return first_loss;
}

Agent::Agent(ExtractorDescriptor descriptor, PolicyState policy, std::vector<std::size_t> hidden)
    : Agent(descriptor, policy, QNetwork(descriptor.dim, std::move(hidden), policy.rng_seed)) {}

Agent::Agent(ExtractorDescriptor descriptor, PolicyState policy, QNetwork q)
    : descriptor_(std::move(descriptor)),
      policy_(policy),
      q_(std::move(q)),
      memory_(policy.memory_capacity),
      optimizer_(policy.optimizer, policy.learning_rate),
      rng_(mix64(policy.rng_seed)) {
  if (q_.input_dim() != descriptor_.dim) {
    throw Error(ErrorCode::kExtractorMismatch, "Q network input dim does not match extractor dim");
  }
  if (policy_.target_sync_interval > 0) target_ = q_;
}

int Agent::act(const FeatureVector& state) { return select_action(q_, state, policy_, rng_); }

int Agent::greedy(const FeatureVector& state) const { return greedy_action(q_.evaluate(state)); }

void Agent::store(Transition t) {
  if (t.state.dim() != descriptor_.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "transition state dim does not match extractor");
  }
  memory_.store(std::move(t));
}

double Agent::train_step() {
  const double loss = qualgate::train_step(q_, memory_, policy_, rng_, optimizer_,
                                           target_ ? &*target_ : nullptr);
  ++train_steps_;
  if (target_ && train_steps_ % static_cast<std::uint64_t>(policy_.target_sync_interval) == 0) {
    target_ = q_;
  }
  return loss;
}

}  // namespace qualgate
