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


#include <functional>

#include "doctest.h"
#include "qualgate/checkpoint.hpp"
#include "qualgate/error.hpp"
#include "test_util.hpp"

using namespace qualgate;
using qualgate::testing::TempDir;

namespace {

FeatureVector random_features(Rng& rng, std::size_t dim) {
  FeatureVector f;
  f.values.resize(dim);
  for (auto& v : f.values) v = rng.uniform(-3.0, 3.0);
  return f;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("checkpoint") {
  const ExtractorDescriptor descriptor{"dct-hist", 99, 1};

  TEST_CASE("round trip is bit exact") {
    TempDir dir;
    PolicyState p;
    p.epsilon = 0.3141;
    p.optimizer = OptimizerKind::kAdam;
    p.gradient_steps = 7;
    p.target_sync_interval = 4;
    p.pooled_bootstrap = true;
    p.rng_seed = 12345678901234ULL;
    const QNetwork q(99, {64, 32}, 77);
    save_checkpoint(q, p, descriptor, dir / "a.qgc");
    CHECK_FALSE(std::filesystem::exists(dir / "a.qgc.tmp"));

    const Checkpoint ck = load_checkpoint(dir / "a.qgc", descriptor);
    CHECK(ck.descriptor == descriptor);
    CHECK(ck.policy == p);
    CHECK(ck.q == q);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const FeatureVector f = random_features(rng, 99);
      CHECK(ck.q.evaluate(f) == q.evaluate(f));
    }
  }

  TEST_CASE("extractor mismatch") {
    TempDir dir;
    save_checkpoint(QNetwork(99, {8}, 1), PolicyState{}, descriptor, dir / "a.qgc");
    CHECK(code_of([&] { load_checkpoint(dir / "a.qgc", ExtractorDescriptor{"dct-hist", 98, 1}); }) ==
          ErrorCode::kExtractorMismatch);
    CHECK(code_of([&] { load_checkpoint(dir / "a.qgc", ExtractorDescriptor{"dct-hist", 99, 2}); }) ==
          ErrorCode::kExtractorMismatch);
    CHECK(code_of([&] { load_checkpoint(dir / "a.qgc", ExtractorDescriptor{"other", 99, 1}); }) ==
          ErrorCode::kExtractorMismatch);
  }

  TEST_CASE("truncation and corruption are IO errors") {
    TempDir dir;
    save_checkpoint(QNetwork(99, {16}, 2), PolicyState{}, descriptor, dir / "a.qgc");
    const auto bytes = qualgate::testing::read_bytes(dir / "a.qgc");
    for (std::size_t keep : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
      qualgate::testing::write_bytes(dir / "t.qgc", {bytes.begin(), bytes.begin() + static_cast<long>(keep)});
      CHECK(code_of([&] { load_checkpoint(dir / "t.qgc"); }) == ErrorCode::kIoError);
    }
    auto flipped = bytes;
    flipped[bytes.size() - 100] ^= 0x40;
    qualgate::testing::write_bytes(dir / "f.qgc", flipped);
    CHECK(code_of([&] { load_checkpoint(dir / "f.qgc"); }) == ErrorCode::kIoError);
    CHECK(code_of([&] { load_checkpoint(dir / "missing.qgc"); }) == ErrorCode::kIoError);
  }

  TEST_CASE("failed load leaves the caller's agent untouched") {
    TempDir dir;
    Agent agent(descriptor, PolicyState{}, {8});
    const auto before = agent.q().flatten();
    qualgate::testing::write_bytes(dir / "bad.qgc", {'Q', 'G', 'A', 'T', 'E'});
    try {
      Checkpoint ck = load_checkpoint(dir / "bad.qgc", descriptor);
      agent.q() = ck.q;
    } catch (const Error&) {
    }
    CHECK(agent.q().flatten() == before);
  }

  TEST_CASE("other major versions are refused, minor versions accepted") {
    TempDir dir;
    save_checkpoint(QNetwork(99, {4}, 2), PolicyState{}, descriptor, dir / "a.qgc");
    auto bytes = qualgate::testing::read_bytes(dir / "a.qgc");
    auto major = bytes;
    major[8] = 2;
    qualgate::testing::write_bytes(dir / "m.qgc", major);
    CHECK(code_of([&] { load_checkpoint(dir / "m.qgc"); }) == ErrorCode::kVersionMismatch);

    // A bumped minor must stay readable; fix up the trailing checksum.
    auto minor = bytes;
    minor[12] = 7;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i + 8 < minor.size(); ++i) {
      h ^= minor[i];
      h *= 0x100000001b3ULL;
    }
    for (int i = 0; i < 8; ++i) minor[minor.size() - 8 + i] = static_cast<std::uint8_t>(h >> (8 * i));
    qualgate::testing::write_bytes(dir / "n.qgc", minor);
    CHECK_NOTHROW(load_checkpoint(dir / "n.qgc", descriptor));
  }
}
