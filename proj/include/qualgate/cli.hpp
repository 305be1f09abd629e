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


#ifndef QUALGATE_CLI_HPP_
#define QUALGATE_CLI_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qualgate/config.hpp"
#include "qualgate/controller.hpp"
#include "qualgate/error.hpp"
#include "qualgate/report.hpp"

namespace qualgate {

// Process exit codes of the qualgate tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitIo = 2,
  kExitBackend = 3,
  kExitInternal = 4,
};

int exit_code_for(ErrorCode code);

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::vector<std::string> manifests;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> checkpoint;
  std::optional<std::string> log;
};

RunConfig apply_overrides(RunConfig config, const Overrides& overrides);

struct TrainResult {
  TrainingSummary summary;
  bool wrote_checkpoint = false;
};

// Offline training for K steps. Writes the step log and, unless K is 0,
// the checkpoint. Progress and the final summary go to out.
TrainResult cmd_train(const RunConfig& config, std::ostream& out);

struct RunResult {
  std::uint64_t steps = 0;
  std::uint64_t retrains = 0;
  std::array<std::uint64_t, 3> steps_by_mode{};  // inference, estimate, retrain
};

// Deploys the checkpointed agent over the stream until it ends. Throws
// kExtractorMismatch when the checkpoint was trained on another extractor.
RunResult cmd_run(const RunConfig& config, std::ostream& out, Mode initial_mode = Mode::kInference);

// Text summary to out, CSV files into out_dir. Malformed lines are
// reported as warnings; returns the number of them.
std::size_t cmd_report(const std::vector<std::filesystem::path>& logs, const std::filesystem::path& out_dir,
                       const LatencyParams& latency, std::ostream& out);

}  // namespace qualgate

#endif  // QUALGATE_CLI_HPP_
