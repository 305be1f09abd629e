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
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "qualgate/agent.hpp"
#include "qualgate/error.hpp"

using namespace qualgate;

namespace {

FeatureVector random_features(Rng& rng, std::size_t dim) {
  FeatureVector f;
  f.values.resize(dim);
  for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
  return f;
}

FeatureVector one_hot(std::size_t dim, std::size_t i) {
  FeatureVector f;
  f.values.assign(dim, 0.0);
  f.values[i] = 1.0;
  return f;
}

ExtractorDescriptor desc(std::size_t dim) { return ExtractorDescriptor{"test", dim, 1}; }

// Network whose output is exactly `values` for every input.
QNetwork constant_network(std::size_t dim, const ActionValues& values) {
  QNetwork q(dim, {4}, 1);
  auto& head = q.layers().back();
  std::fill(head.weights.begin(), head.weights.end(), 0.0);
  for (std::size_t a = 0; a < values.size(); ++a) head.bias[a] = values[a];
  return q;
}

Transition make_transition(const FeatureVector& s, int a, double r, const FeatureVector& next, std::uint64_t step = 0) {
  Transition t;
  t.state = s;
  t.action = a;
  t.reward = r;
  t.next_state = next;
  t.step = step;
  return t;
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("analytic gradient matches central differences") {
    Rng rng(13);
    QNetwork q(8, {16}, 99);
    std::vector<FeatureVector> states;
    std::vector<const FeatureVector*> ptrs;
    std::vector<int> actions;
    std::vector<double> targets;
    for (int j = 0; j < 6; ++j) states.push_back(random_features(rng, 8));
    for (int j = 0; j < 6; ++j) {
      ptrs.push_back(&states[j]);
      actions.push_back(static_cast<int>(rng.below(10)));
      targets.push_back(rng.uniform(-1.0, 1.0));
    }
    std::vector<double> grad;
    const double loss = q.loss_and_gradient(ptrs, actions, targets, grad);
    CHECK(loss == doctest::Approx(q.loss(ptrs, actions, targets)).epsilon(1e-14));
    const std::vector<double> theta = q.flatten();
    REQUIRE(grad.size() == theta.size());

    const double h = 1e-6;
    double diff2 = 0.0, sum2 = 0.0, worst = 0.0;
    QNetwork probe = q;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      probe.assign(plus);
      const double lp = probe.loss(ptrs, actions, targets);
      probe.assign(minus);
      const double lm = probe.loss(ptrs, actions, targets);
      const double numeric = (lp - lm) / (2 * h);
      diff2 += (numeric - grad[i]) * (numeric - grad[i]);
      sum2 += (numeric + grad[i]) * (numeric + grad[i]);
      const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
      if (scale > 1e-4) worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
    }
    CHECK(std::sqrt(diff2 / sum2) < 1e-4);
    CHECK(worst < 1e-4);
  }

  TEST_CASE("epsilon decay rule and closed form") {
    PolicyState p;
    p.epsilon = 1.0;
    CHECK(decay_epsilon(p).epsilon == 0.99);
    PolicyState near = p;
    near.epsilon = 0.0201;
    CHECK(decay_epsilon(near).epsilon == 0.02);

    double power = 1.0;  // 0.99^k, built the same way the recursion builds it
    for (int k = 0; k <= 1000; ++k) {
      CHECK(p.epsilon == std::max(0.02, power));
      CHECK(power == doctest::Approx(std::pow(0.99, k)).epsilon(1e-12));
      const double before = p.epsilon;
      p = decay_epsilon(p);
      CHECK(p.epsilon <= before);
      CHECK(p.epsilon >= 0.02);
      power *= 0.99;
    }
  }

  TEST_CASE("pooled bootstrap regresses onto the minibatch mean") {
    for (bool pooled : {false, true}) {
      PolicyState p;
      p.minibatch_size = 4;
      p.gamma = 0.9;
      p.pooled_bootstrap = pooled;
      Agent agent(desc(3), p, {8});
      Rng rng(5);
      for (int i = 0; i < 4; ++i) {
        agent.store(make_transition(random_features(rng, 3), i * 2, 0.25 * i, random_features(rng, 3)));
      }
      // The whole memory is the minibatch, so the loss is order independent.
      std::vector<double> next_max;
      for (const auto& t : agent.memory().entries()) {
        const auto v = agent.q().evaluate(t.next_state);
        next_max.push_back(*std::max_element(v.begin(), v.end()));
      }
      const double mean = (next_max[0] + next_max[1] + next_max[2] + next_max[3]) / 4.0;
      double expected = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        const auto& t = agent.memory()[k];
        const double y = t.reward + 0.9 * (pooled ? mean : next_max[k]);
        const double d = y - agent.q().evaluate(t.state)[static_cast<std::size_t>(t.action)];
        expected += d * d / 4.0;
      }
      CHECK(agent.train_step() == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("training steps decay epsilon once each") {
    PolicyState p;
    p.minibatch_size = 4;
    p.gradient_steps = 3;
    Agent agent(desc(3), p, {8});
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
      agent.store(make_transition(random_features(rng, 3), i % 10, 0.1, random_features(rng, 3)));
    }
    double power = 1.0;
    for (int k = 1; k <= 300; ++k) {
      const double loss = agent.train_step();
      CHECK(loss >= 0.0);
      power *= 0.99;
      CHECK(agent.policy().epsilon == std::max(0.02, power));
    }
  }

  TEST_CASE("training gate") {
    PolicyState p;  // T = 5, T_start = 200
    CHECK_FALSE(should_train(195, p));
    CHECK_FALSE(should_train(199, p));
    CHECK(should_train(200, p));
    CHECK_FALSE(should_train(201, p));
    CHECK(should_train(205, p));
  }

  TEST_CASE("epsilon one explores uniformly") {
    QNetwork q = constant_network(4, {0, 0, 0, 0, 0, 0, 0, 0, 0, 5});
    PolicyState p;
    p.epsilon = 1.0;
    Rng rng(2718);
    std::array<int, 10> counts{};
    const FeatureVector s = one_hot(4, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_action(q, s, p, rng))];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    // 99th percentile of chi-square with 9 degrees of freedom.
    CHECK(chi2 < 21.666);
  }

  TEST_CASE("greedy choice and tie-break") {
    PolicyState p;
    p.epsilon = 0.0;
    Rng rng(1);
    const FeatureVector s = one_hot(4, 1);
    CHECK(select_action(constant_network(4, {0, 0, 0, 0, 0, 0, 0, 0, 0, 1}), s, p, rng) == 9);
    CHECK(select_action(constant_network(4, {}), s, p, rng) == 0);
    CHECK(greedy_action({1, 3, 3, 0, 0, 0, 0, 0, 0, 3}) == 1);
  }

  TEST_CASE("dimension checks") {
    QNetwork q(5, {8}, 3);
    Rng rng(1);
    CHECK_THROWS_AS(q.evaluate(random_features(rng, 4)), Error);
    try {
      select_action(q, random_features(rng, 6), PolicyState{}, rng);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDimensionMismatch);
    }
    const ActionValues v = q.evaluate(random_features(rng, 5));
    for (double x : v) CHECK(std::isfinite(x));
  }

  TEST_CASE("transition validation") {
    Rng rng(1);
    auto t = make_transition(random_features(rng, 3), 2, 0.5, random_features(rng, 3));
    CHECK_NOTHROW(validate(t));
    auto bad_action = t;
    bad_action.action = 10;
    CHECK_THROWS_AS(validate(bad_action), Error);
    auto bad_reward = t;
    bad_reward.reward = std::nan("");
    CHECK_THROWS_AS(validate(bad_reward), Error);
    auto bad_dim = t;
    bad_dim.next_state = random_features(rng, 4);
    CHECK_THROWS_AS(validate(bad_dim), Error);
  }

  TEST_CASE("replay memory FIFO, flush, and insufficient memory") {
    ReplayMemory m(3);
    Rng rng(4);
    for (int i = 0; i < 4; ++i) m.store(make_transition(one_hot(2, 0), i, i, one_hot(2, 1), i));
    REQUIRE(m.size() == 3);
    CHECK(m[0].step == 1);
    CHECK(m[1].step == 2);
    CHECK(m[2].step == 3);
    m.flush();
    CHECK(m.size() == 0);
    m.store(make_transition(one_hot(2, 0), 0, 0, one_hot(2, 1), 9));
    CHECK(m.sample_indices(1, rng) == std::vector<std::size_t>{0});
    try {
      m.sample_indices(2, rng);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInsufficientMemory);
    }

    PolicyState p;
    p.minibatch_size = 8;
    Agent agent(desc(2), p, {4});
    try {
      agent.train_step();
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInsufficientMemory);
    }
  }

  TEST_CASE("minibatch draws are uniform over a full memory") {
    const std::size_t capacity = 50;
    ReplayMemory m(capacity);
    for (std::size_t i = 0; i < capacity + 20; ++i) m.store(make_transition(one_hot(2, 0), 0, 0, one_hot(2, 1), i));
    Rng rng(31337);
    std::vector<int> hits(capacity, 0);
    const int batches = 1000, batch = 10;
    for (int b = 0; b < batches; ++b) {
      const auto idx = m.sample_indices(batch, rng);
      std::vector<std::size_t> sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
      for (std::size_t i : idx) ++hits[i];
    }
    const double n = batches * batch, p = 1.0 / capacity;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int h : hits) CHECK(std::abs(h - n * p) <= 3 * sigma);
  }

  TEST_CASE("gamma zero regresses onto the immediate reward") {
    PolicyState p;
    p.gamma = 0.0;
    p.minibatch_size = 1;
    p.learning_rate = 1e-2;
    Agent agent(desc(4), p, {16});
    const FeatureVector s = one_hot(4, 2);
    agent.store(make_transition(s, 3, 0.7, one_hot(4, 0)));
    for (int i = 0; i < 3000; ++i) agent.train_step();
    CHECK(agent.q().evaluate(s)[3] == doctest::Approx(0.7).epsilon(1e-2));
  }

  TEST_CASE("two-state MDP converges to the value-iteration fixed point") {
    // State s in {0, 1}, one-hot encoded. Action a moves to state a % 2 and
    // pays 1 + 0.1 * a + 0.5 * s.
    const double gamma = 0.5;
    auto next_of = [](int, int a) { return a % 2; };
    auto reward_of = [](int s, int a) { return 1.0 + 0.1 * a + 0.5 * s; };

    // Value iteration oracle.
    double qstar[2][10] = {};
    for (int it = 0; it < 200; ++it) {
      double v[2];
      for (int s = 0; s < 2; ++s) v[s] = *std::max_element(qstar[s], qstar[s] + 10);
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 10; ++a) qstar[s][a] = reward_of(s, a) + gamma * v[next_of(s, a)];
      }
    }

    PolicyState p;
    p.gamma = gamma;
    p.minibatch_size = 20;
    p.optimizer = OptimizerKind::kAdam;
    p.learning_rate = 3e-3;
    p.rng_seed = 8;
    Agent agent(desc(2), p, {32});
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 10; ++a) agent.store(make_transition(one_hot(2, s), a, reward_of(s, a), one_hot(2, next_of(s, a))));
    }
    for (int i = 0; i < 6000; ++i) agent.train_step();
    for (int s = 0; s < 2; ++s) {
      const ActionValues got = agent.q().evaluate(one_hot(2, s));
      for (int a = 0; a < 10; ++a) CHECK(std::abs(got[a] - qstar[s][a]) <= 0.05 * std::abs(qstar[s][a]));
      CHECK(greedy_action(got) == 9);
    }
  }

  TEST_CASE("a fixed seed fixes the trajectory") {
    auto run = [] {
      PolicyState p;
      p.rng_seed = 42;
      p.minibatch_size = 8;
      p.optimizer = OptimizerKind::kAdam;
      p.target_sync_interval = 3;
      Agent agent(desc(6), p, {12, 12});
      Rng data(5);
      std::vector<int> actions;
      FeatureVector prev = random_features(data, 6);
      for (int t = 0; t < 120; ++t) {
        const FeatureVector s = random_features(data, 6);
        const int a = agent.act(prev);
        actions.push_back(a);
        agent.store(make_transition(prev, a, data.uniform(), s));
        prev = s;
        if (agent.memory().size() >= 8 && t % 5 == 0) agent.train_step();
      }
      return std::make_pair(actions, agent.q().flatten());
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }

  TEST_CASE("optimizer names") {
    CHECK(optimizer_from_string("sgd") == OptimizerKind::kSgd);
    CHECK(optimizer_from_string("adam") == OptimizerKind::kAdam);
    CHECK(to_string(OptimizerKind::kAdam) == "adam");
    CHECK_THROWS_AS(optimizer_from_string("rmsprop"), Error);
  }
}
