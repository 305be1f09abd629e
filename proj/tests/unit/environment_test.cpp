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


#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "qualgate/backend.hpp"
#include "qualgate/codec.hpp"
#include "qualgate/error.hpp"
#include "qualgate/stream.hpp"
#include "qualgate/synth.hpp"
#include "test_util.hpp"

using namespace qualgate;
using qualgate::testing::TempDir;

namespace {

OracleSpec single(const std::string& id, const std::string& label, int q_star, double noise = 0.0) {
  OracleSpec s;
  s.labels[id] = label;
  s.fragility[id] = q_star;
  s.noise = noise;
  s.seed = 3;
  return s;
}

const Raster& sample_image() {
  static const Raster img = render_texture_image(64, 64, 2, 6, 0.5, 17);
  return img;
}

// Loopback server on an ephemeral port, stopped on destruction.
class LoopbackServer {
 public:
  explicit LoopbackServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/classify", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LoopbackServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/classify"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("environment") {
  TEST_CASE("oracle threshold") {
    SimulatedOracle oracle(single("leopard-1", "leopard", 15));
    auto at = [&](int q) {
      return invoke(oracle, compress(sample_image(), QualityLevel::from_value(q), "leopard-1"));
    };
    CHECK(at(15).labels == std::vector<std::string>{"leopard"});
    CHECK(at(95).labels == std::vector<std::string>{"leopard"});
    const auto low = at(5);
    CHECK(low.labels.size() == 1);
    CHECK(low.labels[0] != "leopard");
    CHECK(low.labels[0] == oracle.decoy_label("leopard-1"));
    CHECK(at(5).labels == low.labels);
    CHECK(low.source_quality == QualityLevel::from_value(5));

    SimulatedOracle robust(single("leopard-1", "leopard", 5));
    CHECK(invoke(robust, compress(sample_image(), QualityLevel::from_value(5), "leopard-1")).labels[0] == "leopard");
  }

  TEST_CASE("oracle accuracy is monotone in quality without noise") {
    CorpusOptions co;
    co.count = 30;
    co.seed = 2;
    const auto corpus = make_corpus(builtin_profile("day"), co);
    SimulatedOracle oracle(corpus.oracle);
    for (const auto& img : corpus.images) {
      const auto ref = invoke(oracle, compress(*img.image, reference_quality(), img.source_id));
      int prev = 0;
      for (QualityLevel q : quality_ladder()) {
        const int a = accuracy(invoke(oracle, compress(*img.image, q, img.source_id)), ref);
        CHECK(a >= prev);
        CHECK(a == (q.value() >= img.fragility ? 1 : 0));
        prev = a;
      }
    }
  }

  TEST_CASE("oracle noise is reproducible and roughly at the configured rate") {
    OracleSpec spec;
    spec.noise = 0.3;
    spec.seed = 9;
    for (int i = 0; i < 400; ++i) {
      spec.labels["img" + std::to_string(i)] = "thing";
      spec.fragility["img" + std::to_string(i)] = 5;
    }
    SimulatedOracle a(spec), b(spec);
    int flips = 0;
    for (int i = 0; i < 400; ++i) {
      const auto c = compress(sample_image(), QualityLevel::from_value(45), "img" + std::to_string(i));
      const auto ra = invoke(a, c), rb = invoke(b, c);
      CHECK(ra.labels == rb.labels);
      if (ra.labels[0] != "thing") ++flips;
    }
    CHECK(flips > 80);
    CHECK(flips < 160);
    CHECK(a.calls() == 400);
  }

  TEST_CASE("oracle specs merge by image id") {
    OracleSpec a = single("a1", "cat", 35, 0.1);
    OracleSpec b = single("b1", "dog", 75);
    const OracleSpec m = merge_oracle_specs({a, b});
    CHECK(m.labels.size() == 2);
    CHECK(m.fragility.at("b1") == 75);
    CHECK(m.noise == 0.1);
    CHECK_THROWS_AS(merge_oracle_specs({a, a}), Error);
  }

  TEST_CASE("oracle spec parse, dump and validation") {
    const OracleSpec s = single("a", "cat", 35, 0.1);
    const OracleSpec back = parse_oracle_spec(dump_oracle_spec(s));
    CHECK(back.labels == s.labels);
    CHECK(back.fragility == s.fragility);
    CHECK(back.noise == s.noise);
    CHECK(back.seed == s.seed);
    CHECK_THROWS_AS(parse_oracle_spec(R"({"labels":{"a":"cat"},"fragility":{"a":40}})"), Error);
    CHECK_THROWS_AS(parse_oracle_spec(R"({"labels":{"a":"cat"},"fragility":{}})"), Error);
    CHECK_THROWS_AS(parse_oracle_spec(R"({"labels":{"a":"cat"},"fragility":{"a":35},"noise":1.5})"), Error);
    CHECK_THROWS_AS(parse_oracle_spec("not json"), Error);
  }

  TEST_CASE("unknown image and non-jpeg payloads are rejected") {
    SimulatedOracle oracle(single("a", "cat", 35));
    CHECK(code_of([&] { invoke(oracle, compress(sample_image(), reference_quality(), "b")); }) ==
          ErrorCode::kBackendRejected);
    CompressedImage junk;
    junk.source_id = "a";
    junk.payload = {1, 2, 3};
    CHECK(code_of([&] { invoke(oracle, junk); }) == ErrorCode::kInvalidImage);
  }

  TEST_CASE("invoke records size and latency") {
    SimulatedOracle oracle(single("a", "cat", 35));
    const auto c = compress(sample_image(), reference_quality(), "a");
    InvocationRecord rec;
    invoke(oracle, c, &rec);
    CHECK(rec.request_bytes == c.size_bytes());
    CHECK(rec.latency_ms >= 0.0);
  }

  TEST_CASE("manifest streams") {
    TempDir dir;
    for (int i = 0; i < 3; ++i) save_png(render_texture_image(16, 16, i, 6, 0.5, i), dir / ("p" + std::to_string(i) + ".png"));
    qualgate::testing::write_text(dir / "plain.txt", "# three images\np0.png\n\np1.png night\np2.png\n");
    auto s = SceneryStream::from_manifests({dir / "plain.txt"});
    std::vector<std::string> ids, sceneries;
    while (auto item = s.next_image()) {
      ids.push_back(item->source_id);
      sceneries.push_back(item->scenery_id);
      CHECK(item->image.width() == 16);
    }
    CHECK(ids == std::vector<std::string>{"p0", "p1", "p2"});
    CHECK(sceneries == std::vector<std::string>{"plain", "night", "plain"});
    CHECK_FALSE(s.next_image().has_value());

    qualgate::testing::write_text(dir / "lines.jsonl",
                                  "{\"path\": \"p2.png\", \"scenery_id\": \"day\", \"id\": \"x\"}\n"
                                  "{\"path\": \"" + (dir / "p0.png").string() + "\"}\n");
    const auto entries = read_manifest(dir / "lines.jsonl", "dflt");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].source_id == "x");
    CHECK(entries[0].scenery_id == "day");
    CHECK(entries[1].source_id == "p0");
    CHECK(entries[1].scenery_id == "dflt");

    qualgate::testing::write_text(dir / "broken.txt", "nope.png\n");
    auto broken = SceneryStream::from_manifests({dir / "broken.txt"});
    CHECK(code_of([&] { broken.next_image(); }) == ErrorCode::kIoError);
    CHECK(code_of([&] { SceneryStream::from_manifests({dir / "absent.txt"}); }) == ErrorCode::kIoError);
  }

  TEST_CASE("concatenated sceneries switch at the boundary and shuffle deterministically") {
    CorpusOptions a;
    a.count = 72;
    a.id_prefix = "night";
    a.seed = 1;
    CorpusOptions b = a;
    b.count = 120;
    b.id_prefix = "day";
    auto night = make_corpus(builtin_profile("night"), a).stream();
    night.append(make_corpus(builtin_profile("day"), b).stream());
    auto replay = night;
    night.shuffle_within_sceneries(5);
    replay.shuffle_within_sceneries(5);
    std::size_t pos = 0;
    std::vector<std::string> first, second;
    while (auto item = night.next_image()) {
      CHECK(item->scenery_id == (pos < 72 ? "night" : "day"));
      CHECK(item->position == pos);
      first.push_back(item->source_id);
      ++pos;
    }
    CHECK(pos == 192);
    while (auto item = replay.next_image()) second.push_back(item->source_id);
    CHECK(first == second);
  }

  TEST_CASE("http adapter returns the server's labels and sends the bytes untouched") {
    std::vector<std::uint8_t> seen;
    std::string auth;
    LoopbackServer server([&](const httplib::Request& req, httplib::Response& res) {
      seen.assign(req.body.begin(), req.body.end());
      auth = req.get_header_value("Authorization");
      res.set_content(R"({"result": [{"keyword": "leopard"}, {"keyword": "cat"}]})", "application/json");
    });
    HttpBackendConfig cfg;
    cfg.url = server.url();
    cfg.headers["Authorization"] = "Bearer t0ken";
    cfg.label_json_path = "result.*.keyword";
    auto backend = http_adapter(cfg);
    const auto c = compress(sample_image(), QualityLevel::from_value(35), "a");
    const auto r = invoke(*backend, c);
    CHECK(r.labels == std::vector<std::string>{"leopard", "cat"});
    CHECK(seen == c.payload);
    CHECK(auth == "Bearer t0ken");
  }

  TEST_CASE("http error mapping") {
    std::atomic<int> hits{0};
    LoopbackServer server([&](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      const std::string mode = req.get_header_value("X-Mode");
      if (mode == "500") {
        res.status = 500;
      } else if (mode == "404") {
        res.status = 404;
      } else if (mode == "bad") {
        res.set_content("{labels: nope", "application/json");
      } else {
        res.set_content(R"({"other": 1})", "application/json");
      }
    });
    const auto c = compress(sample_image(), QualityLevel::from_value(35), "a");
    auto with = [&](const std::string& mode) {
      HttpBackendConfig cfg;
      cfg.url = server.url();
      cfg.headers["X-Mode"] = mode;
      cfg.backoff_ms = 1;
      return http_adapter(cfg);
    };
    hits = 0;
    CHECK(code_of([&] { invoke(*with("500"), c); }) == ErrorCode::kBackendUnavailable);
    CHECK(hits == 2);  // one retry
    hits = 0;
    CHECK(code_of([&] { invoke(*with("404"), c); }) == ErrorCode::kBackendRejected);
    CHECK(hits == 1);
    try {
      invoke(*with("bad"), c);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBackendRejected);
      CHECK(std::string(e.what()).size() > 10);
    }
    CHECK(code_of([&] { invoke(*with("missing"), c); }) == ErrorCode::kBackendRejected);
  }

  TEST_CASE("http adapter: unreachable host and bad config") {
    HttpBackendConfig cfg;
    cfg.url = "http://127.0.0.1:1/classify";
    cfg.retries = 0;
    cfg.timeout_ms = 500;
    auto backend = http_adapter(cfg);
    const auto c = compress(sample_image(), QualityLevel::from_value(35), "a");
    const ErrorCode code = code_of([&] { invoke(*backend, c); });
    CHECK((code == ErrorCode::kBackendUnavailable || code == ErrorCode::kTimeout));

    HttpBackendConfig bad;
    bad.url = "ftp://example.com/x";
    CHECK(code_of([&] { http_adapter(bad); }) == ErrorCode::kConfigError);
    bad.url = "not a url";
    CHECK(code_of([&] { http_adapter(bad); }) == ErrorCode::kConfigError);
  }

  TEST_CASE("label extraction paths") {
    CHECK(extract_labels(R"({"labels": ["a", "b"]})", "labels") == std::vector<std::string>{"a", "b"});
    CHECK(extract_labels(R"({"Labels": [{"Name": "x"}, {"Name": "y"}]})", "Labels.*.Name") ==
          std::vector<std::string>{"x", "y"});
    CHECK(extract_labels(R"({"r": [["p", "q"]]})", "r.0") == std::vector<std::string>{"p", "q"});
    CHECK(extract_labels(R"({"labels": []})", "labels").empty());
    CHECK_THROWS_AS(extract_labels(R"({"labels": [1]})", "labels"), Error);
    CHECK_THROWS_AS(extract_labels("{", "labels"), Error);
  }
}
