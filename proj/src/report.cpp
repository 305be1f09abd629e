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


#include "qualgate/report.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "qualgate/codec.hpp"
#include "qualgate/error.hpp"

namespace qualgate {
namespace {

std::string phase_of(const StepRecord& r) {
  return r.phase.empty() ? std::string(to_string(r.mode)) : r.phase;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace

StepLog read_step_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read log " + path.string());
  StepLog log;
  log.name = path.stem().string();
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.records.push_back(parse_step_record(line));
    } catch (const Error& e) {
      log.warnings.push_back(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return log;
}

std::vector<StepLog> read_step_logs(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::future<StepLog>> jobs;
  jobs.reserve(paths.size());
  for (const auto& p : paths) jobs.push_back(std::async(std::launch::async, [p] { return read_step_log(p); }));
  std::vector<StepLog> logs;
  logs.reserve(paths.size());
  for (auto& j : jobs) logs.push_back(j.get());
  return logs;
}

std::size_t QualityHistogram::total() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

double QualityHistogram::fraction(std::size_t index) const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts.at(index)) / static_cast<double>(n);
}

double QualityHistogram::mean_quality() const {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    sum += static_cast<double>(counts[i]) * QualityLevel::from_index(static_cast<int>(i)).value();
  }
  return sum / static_cast<double>(n);
}

Report build_report(const std::vector<StepLog>& logs, const LatencyParams& latency) {
  Report report;
  for (const auto& log : logs) {
    report.warnings.insert(report.warnings.end(), log.warnings.begin(), log.warnings.end());

    std::map<std::string, QualityHistogram> hist;
    struct Acc {
      std::size_t steps = 0, measured = 0;
      double size_c = 0, delta_s = 0, accuracy = 0, uploaded = 0, reference = 0;
    };
    std::map<std::string, Acc> phases;
    double backend_ms = 0.0;
    std::size_t backend_n = 0;

    for (const auto& r : log.records) {
      auto& h = hist[r.scenery];
      h.log = log.name;
      h.scenery = r.scenery;
      ++h.counts[static_cast<std::size_t>(QualityLevel::from_value(r.quality).index())];

      Acc& a = phases[phase_of(r)];
      ++a.steps;
      a.size_c += static_cast<double>(r.size_c);
      if (r.delta_s) a.delta_s += *r.delta_s;
      if (r.accuracy) {
        ++a.measured;
        a.accuracy += *r.accuracy;
      }
      a.uploaded += static_cast<double>(r.uploaded_bytes);
      a.reference += static_cast<double>(r.size_ref.value_or(0));
      if (r.backend_ms > 0.0) {
        backend_ms += r.backend_ms;
        ++backend_n;
      }
    }
    for (auto& [key, h] : hist) report.histograms.push_back(h);

    for (const char* name : {"train", "inference", "estimate", "retrain"}) {
      auto it = phases.find(name);
      if (it == phases.end()) continue;
      const Acc& a = it->second;
      PhaseSummary s;
      s.log = log.name;
      s.phase = name;
      s.steps = a.steps;
      s.mean_size_c = a.size_c / static_cast<double>(a.steps);
      s.mean_delta_s = a.delta_s / static_cast<double>(a.steps);
      if (a.measured > 0) s.relative_accuracy = a.accuracy / static_cast<double>(a.measured);
      s.upload_overhead = a.reference > 0.0 ? a.uploaded / a.reference : 0.0;
      report.phases.push_back(s);
    }

    if (log.records.empty()) continue;
    // The adaptive row describes what deployment sends: inference-phase
    // uploads when there are any, every compressed upload otherwise.
    const bool have_inference = phases.contains("inference");
    double ref_sum = 0.0, c_sum = 0.0;
    std::size_t ref_n = 0, c_n = 0;
    for (const auto& r : log.records) {
      if (r.size_ref) {
        ref_sum += static_cast<double>(*r.size_ref);
        ++ref_n;
      }
      if (!have_inference || phase_of(r) == "inference") {
        c_sum += static_cast<double>(r.size_c);
        ++c_n;
      }
    }
    const double inference_ms =
        latency.inference_ms.value_or(backend_n > 0 ? backend_ms / static_cast<double>(backend_n) : 0.0);
    auto row = [&](const char* variant, double avg) {
      LatencyRow l;
      l.log = log.name;
      l.variant = variant;
      l.avg_size_bytes = avg;
      l.inference_ms = inference_ms;
      l.transmission_ms = estimated_latency(avg, latency.bandwidth_bits_per_s, 0.0);
      l.overall_ms = estimated_latency(avg, latency.bandwidth_bits_per_s, inference_ms);
      return l;
    };
    if (ref_n > 0) report.latency.push_back(row("reference", ref_sum / static_cast<double>(ref_n)));
    if (c_n > 0) report.latency.push_back(row("adaptive", c_sum / static_cast<double>(c_n)));
  }
  return report;
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  out << "Chosen quality histograms\n";
  for (const auto& h : report.histograms) {
    out << "  " << h.log << " / " << (h.scenery.empty() ? "-" : h.scenery) << "  (" << h.total()
        << " steps, mean q " << fmt(h.mean_quality(), 1) << ")\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      const double f = h.fraction(i);
      out << "    q" << (i == 0 ? " " : "") << QualityLevel::from_index(static_cast<int>(i)).value() << "  "
          << fmt(f, 3) << "  " << std::string(static_cast<std::size_t>(f * 50.0 + 0.5), '#') << "\n";
    }
  }
  out << "\nPer-phase summary\n";
  out << "  log                  phase      steps   mean_size  mean_ds  rel_acc  overhead\n";
  for (const auto& p : report.phases) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-20s %-10s %6zu %11.1f %8.4f %8s %9.4f\n", p.log.c_str(), p.phase.c_str(),
                  p.steps, p.mean_size_c, p.mean_delta_s,
                  p.relative_accuracy ? fmt(*p.relative_accuracy).c_str() : "-", p.upload_overhead);
    out << line;
  }
  out << "\nLatency (KB = 1000 bytes, ms)\n";
  out << "  log                  variant      avg_size_KB  inference  transmission  overall\n";
  for (const auto& l : report.latency) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-20s %-12s %11.2f %10.2f %13.2f %8.2f\n", l.log.c_str(), l.variant.c_str(),
                  l.avg_size_bytes / 1000.0, l.inference_ms, l.transmission_ms, l.overall_ms);
    out << line;
  }
  if (!report.warnings.empty()) {
    out << "\nWarnings (" << report.warnings.size() << " malformed lines skipped)\n";
    for (const auto& w : report.warnings) out << "  " << w << "\n";
  }
  return out.str();
}

void write_report_csv(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());

  std::ostringstream h;
  h << "log,scenery,quality,count,fraction\n";
  for (const auto& hist : report.histograms) {
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
      h << csv_field(hist.log) << ',' << csv_field(hist.scenery) << ','
        << QualityLevel::from_index(static_cast<int>(i)).value() << ',' << hist.counts[i] << ','
        << fmt(hist.fraction(i), 6) << '\n';
    }
  }
  write_file(dir / "histogram.csv", h.str());

  std::ostringstream p;
  p << "log,phase,steps,mean_size_bytes,mean_delta_s,relative_accuracy,upload_overhead\n";
  for (const auto& s : report.phases) {
    p << csv_field(s.log) << ',' << s.phase << ',' << s.steps << ',' << fmt(s.mean_size_c, 2) << ','
      << fmt(s.mean_delta_s, 6) << ',' << (s.relative_accuracy ? fmt(*s.relative_accuracy, 6) : "") << ','
      << fmt(s.upload_overhead, 6) << '\n';
  }
  write_file(dir / "phases.csv", p.str());

  std::ostringstream l;
  l << "log,variant,avg_size_bytes,inference_ms,transmission_ms,overall_ms\n";
  for (const auto& row : report.latency) {
    l << csv_field(row.log) << ',' << row.variant << ',' << fmt(row.avg_size_bytes, 2) << ','
      << fmt(row.inference_ms, 4) << ',' << fmt(row.transmission_ms, 4) << ',' << fmt(row.overall_ms, 4) << '\n';
  }
  write_file(dir / "latency.csv", l.str());
}

}  // namespace qualgate
