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


// qualgate: train, deploy and summarize the adaptive JPEG quality gateway.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qualgate/cli.hpp"
#include "qualgate/error.hpp"
#include "qualgate/synth.hpp"

using namespace qualgate;

namespace {

RunConfig load_with(const std::string& config_path, const Overrides& o) {
  RunConfig c = config_path.empty() ? default_run_config() : load_run_config(config_path);
  return apply_overrides(std::move(c), o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive JPEG quality gateway for cloud vision services"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  std::uint64_t seed = 0;
  std::string checkpoint, out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--manifest", o.manifests, "image manifest(s), replacing the configured ones");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--checkpoint", checkpoint, "agent checkpoint path");
  };

  auto* train = app.add_subcommand("train", "train the agent offline for K steps");
  add_common(train);
  train->add_option("--out", out, "step log path");

  auto* run = app.add_subcommand("run", "deploy a trained agent over a stream");
  add_common(run);
  run->add_option("--out", out, "step log path");
  std::string initial_mode = "inference";
  run->add_option("--mode", initial_mode, "initial mode")->check(CLI::IsMember({"inference", "estimate", "retrain"}));

  auto* report = app.add_subcommand("report", "summarize step logs");
  std::vector<std::string> logs;
  std::vector<std::string> oracles;
  report->add_option("logs", logs, "JSONL step logs")->required();
  std::string report_dir = "report";
  report->add_option("--out", report_dir, "directory for CSV output");
  double mbps = 27.64;
  report->add_option("--bandwidth-mbps", mbps, "link bandwidth for the latency table")->check(CLI::PositiveNumber);
  double inference_ms = -1.0;
  report->add_option("--inference-ms", inference_ms, "inference time; default is the logged mean");

  auto* init = app.add_subcommand("init-config", "write the default configuration");
  init->add_option("--out", out, "destination (stdout when omitted)");
  init->add_option("--manifest", o.manifests, "manifest(s) to reference");
  init->add_option("--oracle", oracles, "oracle spec(s); default is oracle.json beside each manifest");
  init->add_option("--seed", seed, "random seed");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus with its oracle spec");
  std::string profile = "day";
  std::size_t count = 100;
  double noise = 0.0;
  std::vector<double> weights;
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--profile", profile, "scenery profile")->check(CLI::IsMember({"day", "night"}));
  synth->add_option("--count", count, "number of images");
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--noise", noise, "oracle label-flip probability")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--weights", weights, "relative frequency per texture level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto seeded = [&](CLI::App* cmd) { return cmd->count("--seed") > 0; };
    if (*train || *run) {
      CLI::App* cmd = *train ? train : run;
      if (seeded(cmd)) o.seed = seed;
      if (!checkpoint.empty()) o.checkpoint = checkpoint;
      if (!out.empty()) o.log = out;
      const RunConfig c = load_with(config_path, o);
      if (*train) {
        cmd_train(c, std::cout);
      } else {
        cmd_run(c, std::cout, mode_from_string(initial_mode));
      }
    } else if (*report) {
      LatencyParams latency;
      latency.bandwidth_bits_per_s = mbps * 1e6;
      if (inference_ms >= 0.0) latency.inference_ms = inference_ms;
      std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
      const std::size_t bad = cmd_report(paths, report_dir, latency, std::cout);
      if (bad > 0) std::cerr << "warning: " << bad << " malformed log line(s) skipped\n";
    } else if (*init) {
      RunConfig c = default_run_config();
      c.manifests = o.manifests;
      if (seeded(init)) {
        c.seed = seed;
        c.policy.rng_seed = seed;
      }
      if (!oracles.empty()) {
        c.backend.oracles = oracles;
      } else {
        // Synthetic corpora keep oracle.json next to manifest.txt.
        for (const auto& m : c.manifests) {
          c.backend.oracles.push_back((std::filesystem::path(m).parent_path() / "oracle.json").string());
        }
      }
      const std::string text = dump_run_config(c);
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!(f << text)) throw Error(ErrorCode::kIoError, "cannot write " + out);
      }
    } else if (*synth) {
      SceneryProfile p = builtin_profile(profile);
      if (!weights.empty()) p.level_weights = weights;
      CorpusOptions co;
      co.count = count;
      co.seed = seeded(synth) ? seed : 1;
      co.noise = noise;
      write_corpus(make_corpus(p, co), out);
      std::cout << "wrote " << count << " images to " << out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
