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


#ifndef QUALGATE_REPORT_HPP_
#define QUALGATE_REPORT_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qualgate/controller.hpp"

namespace qualgate {

struct StepLog {
  std::string name;  // file stem
  std::vector<StepRecord> records;
  // "<path>:<line>: <problem>" for every line that failed to parse.
  std::vector<std::string> warnings;
};

// Skips and reports malformed lines. Throws kIoError if the file cannot be
// read.
StepLog read_step_log(const std::filesystem::path& path);
// Reads several logs in parallel; order follows the input.
std::vector<StepLog> read_step_logs(const std::vector<std::filesystem::path>& paths);

struct QualityHistogram {
  std::string log;
  std::string scenery;
  std::array<std::size_t, 10> counts{};

  std::size_t total() const;
  double fraction(std::size_t index) const;  // 0 when empty
  double mean_quality() const;               // 0 when empty
};

struct PhaseSummary {
  std::string log;
  std::string phase;  // train, inference, estimate or retrain
  std::size_t steps = 0;
  double mean_size_c = 0.0;
  double mean_delta_s = 0.0;
  std::optional<double> relative_accuracy;  // absent when never measured
  double upload_overhead = 0.0;             // uploaded bytes / reference bytes
};

struct LatencyRow {
  std::string log;
  std::string variant;  // "reference" (q = 75 uploads) or "adaptive"
  double avg_size_bytes = 0.0;
  double inference_ms = 0.0;
  double transmission_ms = 0.0;
  double overall_ms = 0.0;
};

struct LatencyParams {
  double bandwidth_bits_per_s = 27.64e6;
  // Taken from the logged backend round trips when not given.
  std::optional<double> inference_ms;
};

struct Report {
  std::vector<QualityHistogram> histograms;
  std::vector<PhaseSummary> phases;
  std::vector<LatencyRow> latency;
  std::vector<std::string> warnings;
};

Report build_report(const std::vector<StepLog>& logs, const LatencyParams& latency = {});

std::string render_text(const Report& report);

// Writes histogram.csv, phases.csv and latency.csv into dir.
void write_report_csv(const Report& report, const std::filesystem::path& dir);

}  // namespace qualgate

#endif  // QUALGATE_REPORT_HPP_
