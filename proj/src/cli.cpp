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


#include "qualgate/cli.hpp"

#include <fstream>

#include "qualgate/checkpoint.hpp"
#include "qualgate/error.hpp"

namespace qualgate {
namespace {

std::ofstream open_log(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kConfigError, "no log path given");
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write log " + path);
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("n/a"); }

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kUnsupportedQuality:
    case ErrorCode::kExtractorMismatch:
    case ErrorCode::kDimensionMismatch:
      return kExitConfig;
    case ErrorCode::kIoError:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kInvalidImage:
      return kExitIo;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kBackendRejected:
    case ErrorCode::kTimeout:
      return kExitBackend;
    default:
      return kExitInternal;
  }
}

RunConfig apply_overrides(RunConfig config, const Overrides& o) {
  if (!o.manifests.empty()) config.manifests = o.manifests;
  if (o.seed) {
    config.seed = *o.seed;
    config.policy.rng_seed = *o.seed;
  }
  if (o.checkpoint) config.checkpoint = *o.checkpoint;
  if (o.log) config.log = *o.log;
  validate(config);
  return config;
}

TrainResult cmd_train(const RunConfig& config, std::ostream& out) {
  validate(config);
  auto log = open_log(config.log);
  TrainResult result;
  if (config.K == 0) {
    out << "K = 0: nothing to train; log left empty and no checkpoint written\n";
    return result;
  }
  auto extractor = make_configured_extractor(config);
  auto backend = make_backend(config);
  SceneryStream stream = make_stream(config);
  Agent agent(extractor->descriptor(), config.policy, config.hidden);

  result.summary = train_agent(agent, *extractor, *backend, stream, config.K, config.controller.reward,
                               config.controller.n, config.controller.concurrent_uploads,
                               [&](const StepRecord& r) { log << to_json_line(r) << '\n'; });
  log.flush();
  if (!log) throw Error(ErrorCode::kIoError, "write failed: " + config.log);

  save_checkpoint(agent.q(), agent.policy(), agent.descriptor(), config.checkpoint);
  result.wrote_checkpoint = true;
  const auto& s = result.summary;
  out << "trained " << s.steps << " steps (" << s.train_steps << " updates), epsilon "
      << agent.policy().epsilon << "\n"
      << "recent accuracy " << opt(s.recent_accuracy) << ", recent reward " << opt(s.recent_reward)
      << ", mean delta_s " << s.mean_delta_s << ", upload overhead " << s.mean_upload_overhead << "\n"
      << "checkpoint " << config.checkpoint << ", log " << config.log << "\n";
  return result;
}

RunResult cmd_run(const RunConfig& config, std::ostream& out, Mode initial_mode) {
  validate(config);
  auto extractor = make_configured_extractor(config);
  Checkpoint ckpt = load_checkpoint(config.checkpoint, extractor->descriptor());
  PolicyState policy = config.policy;
  policy.epsilon = ckpt.policy.epsilon;
  Agent agent(ckpt.descriptor, policy, std::move(ckpt.q));

  auto backend = make_backend(config);
  SceneryStream stream = make_stream(config);
  auto log = open_log(config.log);

  Controller controller(config.controller, extractor, agent, *backend, config.seed, initial_mode);
  RunResult result;
  while (auto item = stream.next_image()) {
    StepOutcome o = controller.process(item->image, item->source_id, item->scenery_id);
    log << to_json_line(o.record) << '\n';
    ++result.steps_by_mode[static_cast<std::size_t>(o.record.mode)];
  }
  controller.finish();
  log.flush();
  if (!log) throw Error(ErrorCode::kIoError, "write failed: " + config.log);
  result.steps = controller.state().step;
  result.retrains = controller.state().retrains;
  out << "processed " << result.steps << " images: " << result.steps_by_mode[0] << " inference, "
      << result.steps_by_mode[1] << " estimate, " << result.steps_by_mode[2] << " retrain ("
      << result.retrains << " retrain intervals); final p_est " << controller.state().p_est << "\n"
      << "log " << config.log << "\n";
  return result;
}

std::size_t cmd_report(const std::vector<std::filesystem::path>& logs, const std::filesystem::path& out_dir,
                       const LatencyParams& latency, std::ostream& out) {
  if (logs.empty()) throw Error(ErrorCode::kConfigError, "report needs at least one log");
  const Report report = build_report(read_step_logs(logs), latency);
  out << render_text(report);
  write_report_csv(report, out_dir);
  out << "\nCSV written to " << out_dir.string() << "\n";
  return report.warnings.size();
}

}  // namespace qualgate
