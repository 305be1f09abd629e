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
#include <cmath>
#include <random>

#include "doctest.h"
#include "qualgate/codec.hpp"
#include "qualgate/error.hpp"
#include "qualgate/metrics.hpp"
#include "qualgate/synth.hpp"

using namespace qualgate;

namespace {

PredictionResult P(std::vector<std::string> labels) { return PredictionResult{std::move(labels), {}, false}; }

// Brute-force reference: compare every allowed pair character by character.
int oracle_accuracy(const std::vector<std::string>& c, const std::vector<std::string>& r) {
  auto canon = [](const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    return out;
  };
  const std::size_t top = std::min<std::size_t>(5, c.size());
  for (std::size_t i = 0; i < top; ++i) {
    for (const auto& g : r) {
      const std::string a = canon(c[i]), b = canon(g);
      if (a.size() != b.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < a.size(); ++k) same = same && a[k] == b[k];
      if (same) return 1;
    }
  }
  return 0;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("accuracy examples") {
    CHECK(accuracy(P({"leopard", "cat", "jaguar"}), P({"leopard"})) == 1);
    CHECK(accuracy(P({"electric fan"}), P({"chameleon"})) == 0);
    CHECK(accuracy(P({"a", "b", "c"}), P({"a", "b", "c"})) == 1);
    CHECK(accuracy(P({}), P({"donut"})) == 0);
    CHECK(accuracy(P({"donut"}), P({})) == 0);
    CHECK(accuracy(P({"  Leopard "}), P({"leopard"})) == 1);
    // Only the first five compressed labels count.
    CHECK(accuracy(P({"a", "b", "c", "d", "e", "x"}), P({"x"})) == 0);
    CHECK(accuracy(P({"a", "b", "c", "d", "x"}), P({"x"})) == 1);
  }

  TEST_CASE("accuracy matches a brute-force oracle on 1000 random pairs") {
    std::mt19937_64 gen(2024);
    const std::vector<std::string> vocab = {"cat", "Cat", " cat", "dog", "DOG ", "leopard", "fan", "donut",
                                            "car", "tree", "sky", "bird", "Bird", "x", ""};
    std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1), len(0, 8);
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<std::string> c(len(gen)), r(len(gen));
      for (auto& s : c) s = vocab[word(gen)];
      for (auto& s : r) s = vocab[word(gen)];
      if (accuracy(P(c), P(r)) == oracle_accuracy(c, r)) ++agree;
    }
    CHECK(agree == 1000);
  }

  TEST_CASE("labels past rank five never change the answer") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::string> c = {"a", "b", "c", "d", "e", "f", "g", "h"};
      const auto r = P({"g", "q"});
      const int before = accuracy(P(c), r);
      std::shuffle(c.begin() + 5, c.end(), gen);
      CHECK(accuracy(P(c), r) == before);
    }
  }

  TEST_CASE("reward") {
    const RewardParams p{};
    CHECK(reward(0.5, 1, p) == 0.5);
    CHECK(reward(1.0, 1, p) == 0.0);
    CHECK(reward(0.3, 0, p) == -0.3);
    CHECK(reward(0.2, 1, RewardParams{2.0, 0.5}) == doctest::Approx(2.3));
    for (double ds = 0.05; ds < 1.5; ds += 0.05) {
      CHECK(reward(ds, 1, p) > reward(ds, 0, p));
      CHECK(reward(ds, 1, p) > reward(ds + 0.01, 1, p));
      CHECK(reward(ds, 0, p) > reward(ds + 0.01, 0, p));
    }
    CHECK_THROWS_AS(validate(RewardParams{0.0, 0.0}), Error);
    CHECK_THROWS_AS(validate(RewardParams{1.0, std::nan("")}), Error);
    CHECK_NOTHROW(validate(RewardParams{}));
  }

  TEST_CASE("an unrecognized upload scores below every recognized one with a smaller file") {
    // Rewards over the whole ladder for one image under its oracle.
    CorpusOptions co;
    co.count = 1;
    co.seed = 4;
    const auto corpus = make_corpus(builtin_profile("day"), co);
    const auto& img = corpus.images.front();
    const auto ref = compress(*img.image, reference_quality(), img.source_id);
    std::vector<double> ds;
    for (QualityLevel q : quality_ladder()) ds.push_back(compression_ratio(compress(*img.image, q, img.source_id), ref));
    const double wrong = reward(ds.front(), 0, RewardParams{});
    for (double d : ds) {
      if (d < ds.front() + 1.0) CHECK(wrong < reward(d, 1, RewardParams{}));
    }
  }

  TEST_CASE("recent mean") {
    RollingWindow w(10);
    CHECK_THROWS_AS(recent_mean(w, 0), Error);
    for (double v : {1.0, 1.0, 0.0, 1.0}) w.push(v);
    CHECK(recent_mean(w, 4) == 0.75);

    RollingWindow w2(10);
    for (int i = 0; i < 10; ++i) w2.push(0.0);
    for (int i = 0; i < 10; ++i) w2.push(1.0);
    CHECK(recent_mean(w2, 20) == 1.0);
    CHECK(w2.size() == 10);
    CHECK(w2.earliest_mean() == 0.0);

    for (double v : {0.0, 0.3, 1.0, 0.1}) {
      RollingWindow c(10);
      for (std::size_t n = 1; n <= 40; ++n) {
        c.push(v);
        CHECK(recent_mean(c, n) == doctest::Approx(v).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("earliest mean freezes after n samples and resets on clear") {
    RollingWindow w(3);
    w.push(1);
    w.push(0);
    CHECK_FALSE(w.earliest_mean().has_value());
    w.push(1);
    CHECK(w.earliest_mean() == doctest::Approx(2.0 / 3.0));
    w.push(0);
    w.push(0);
    CHECK(w.earliest_mean() == doctest::Approx(2.0 / 3.0));
    w.clear();
    CHECK(w.size() == 0);
    CHECK(w.total() == 0);
    CHECK_FALSE(w.earliest_mean().has_value());
  }

  TEST_CASE("p_est update") {
    CHECK(update_p_est(0.2, 0.0, -3.0) == 0.2);
    CHECK(update_p_est(0.2, -0.1, -3.0) == doctest::Approx(0.5));
    CHECK(0.9 + -3.0 * -0.1 > 1.0);
    CHECK(update_p_est(0.9, -0.1, -3.0) == 1.0);
    CHECK(update_p_est(0.2, 0.1, -3.0) == kDefaultPestFloor);
    CHECK(update_p_est(0.2, 0.1, -3.0, 0.0) == 0.0);
  }

  TEST_CASE("p_est telescopes along random accuracy streams") {
    std::mt19937_64 gen(77);
    std::bernoulli_distribution bit(0.5);
    int checked = 0;
    for (int t = 0; t < 2000; ++t) {
      // |omega| < 0.45 keeps p0 + omega * (difference of means) inside the clamp bounds.
      const double p0 = 0.5, omega = -0.4;
      RollingWindow w(10);
      double p = p0;
      std::optional<double> first, last;
      bool clamped = false;
      const double bias = std::uniform_real_distribution<double>(0.3, 0.9)(gen);
      std::bernoulli_distribution a(bias);
      for (std::size_t n = 1; n <= 60 && !clamped; ++n) {
        w.push(a(gen) ? 1.0 : 0.0);
        const double m = recent_mean(w, n);
        if (!first) {
          first = m;
        } else {
          const double raw = p + omega * (m - *last);
          if (raw <= kDefaultPestFloor || raw >= 1.0) clamped = true;
          p = update_p_est(p, m - *last, omega);
        }
        last = m;
      }
      if (clamped) continue;
      ++checked;
      CHECK(std::abs((p - p0) - omega * (*last - *first)) <= 1e-9);
    }
    CHECK(checked == 2000);
  }
}
