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

#ifndef QUALGATE_AGENT_HPP_
#define QUALGATE_AGENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qualgate/codec.hpp"
#include "qualgate/features.hpp"
#include "qualgate/rng.hpp"

namespace qualgate {

using ActionValues = std::array<double, kNumQualityLevels>;

struct Transition {
  FeatureVector state;
  int action = 0;  // ladder index
  double reward = 0.0;
  FeatureVector next_state;
  std::optional<int> accuracy;
  std::uint64_t step = 0;
};

// Throws kDimensionMismatch / kUnsupportedQuality / kInternal on a malformed
// transition.
void validate(const Transition& t);

// Bounded FIFO replay buffer; the oldest entry is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void store(Transition t);
  void flush() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const Transition& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<Transition>& entries() const { return entries_; }

  // Distinct indices drawn uniformly without replacement.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> entries_;
};

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct PolicyState {
  double epsilon = 1.0;
  double epsilon_min = 0.02;
  double mu_dec = 0.99;
  double gamma = 0.95;
  int train_interval = 5;  // T
  int train_start = 200;   // T_start
  std::size_t minibatch_size = 32;
  std::size_t memory_capacity = 10000;
  double learning_rate = 1e-3;
  // Optimizer steps per training invocation, each on a fresh minibatch.
  int gradient_steps = 1;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  // 0 keeps a single network (targets use the parameters before the step);
  // k > 0 refreshes a frozen target copy every k training steps.
  int target_sync_interval = 0;
  // Replace each max_a' Q(s', a') in a minibatch by the minibatch mean of
  // those values. Valid when the next image does not depend on the action.
  bool pooled_bootstrap = false;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

// epsilon <- mu_dec * epsilon, floored at epsilon_min.
PolicyState decay_epsilon(PolicyState policy);

// Training gate: every T-th step once T_start steps have been taken.
bool should_train(std::uint64_t step, const PolicyState& policy);

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Feed-forward action-value approximator: ReLU hidden layers, linear
// 10-way head.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(std::size_t input_dim, std::vector<std::size_t> hidden, std::uint64_t seed);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::vector<std::size_t> hidden_widths() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  // Throws kDimensionMismatch when state.dim() != input_dim().
  ActionValues evaluate(const FeatureVector& state) const;

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> params);

  // Mean over the batch of (target_j - Q(state_j, action_j))^2, and its
  // gradient w.r.t. the flattened parameters (targets held constant).
  double loss(std::span<const FeatureVector* const> states, std::span<const int> actions,
              std::span<const double> targets) const;
  double loss_and_gradient(std::span<const FeatureVector* const> states,
                           std::span<const int> actions, std::span<const double> targets,
                           std::vector<double>& gradient) const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

// Lowest index among the maxima (smallest file on ties).
int greedy_action(const ActionValues& values);

// With probability epsilon a uniform ladder index, else the greedy action.
int select_action(const QNetwork& q, const FeatureVector& state, const PolicyState& policy, Rng& rng);

// First-order update rule applied to the flattened parameter vector.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double learning_rate) : kind_(kind), lr_(learning_rate) {}

  void step(std::vector<double>& params, const std::vector<double>& gradient);
  void reset();

 private:
  OptimizerKind kind_ = OptimizerKind::kSgd;
  double lr_ = 1e-3;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t t_ = 0;
};

// Owns the Q network, replay memory, exploration state and RNG.
class Agent {
 public:
  Agent(ExtractorDescriptor descriptor, PolicyState policy, std::vector<std::size_t> hidden);
  Agent(ExtractorDescriptor descriptor, PolicyState policy, QNetwork q);

  const ExtractorDescriptor& descriptor() const { return descriptor_; }
  const PolicyState& policy() const { return policy_; }
  PolicyState& policy() { return policy_; }
  const QNetwork& q() const { return q_; }
  QNetwork& q() { return q_; }
  ReplayMemory& memory() { return memory_; }
  const ReplayMemory& memory() const { return memory_; }
  Rng& rng() { return rng_; }

  int act(const FeatureVector& state);     // epsilon-greedy
  int greedy(const FeatureVector& state) const;
  void store(Transition t);

  // Samples a minibatch, regresses Q(s, a) onto r + gamma max_a' Q(s', a')
  // with one optimizer step, then decays epsilon. Returns the pre-step loss.
  // Throws kInsufficientMemory when fewer than minibatch_size transitions
  // are stored.
  double train_step();

  std::uint64_t train_steps() const { return train_steps_; }

 private:
  ExtractorDescriptor descriptor_;
  PolicyState policy_;
  QNetwork q_;
  std::optional<QNetwork> target_;
  ReplayMemory memory_;
  Optimizer optimizer_;
  Rng rng_;
  std::uint64_t train_steps_ = 0;
};

// Free-function form over explicit pieces; Agent::train_step forwards here.
double train_step(QNetwork& q, const ReplayMemory& memory, PolicyState& policy, Rng& rng,
                  Optimizer& optimizer, const QNetwork* target = nullptr);

}  // namespace qualgate

#endif  // QUALGATE_AGENT_HPP_
