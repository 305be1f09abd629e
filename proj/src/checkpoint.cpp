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

#include "qualgate/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "qualgate/error.hpp"

namespace qualgate {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'Q', 'G', 'A', 'T', 'E', 'C', 'K', 'P'};

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes, std::size_t count) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < count; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::vector<std::uint8_t>& out, const T& value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    need(sizeof(T));
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kIoError, "checkpoint is truncated");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json policy_to_json(const PolicyState& p) {
  return {{"epsilon", p.epsilon},
          {"epsilon_min", p.epsilon_min},
          {"mu_dec", p.mu_dec},
          {"gamma", p.gamma},
          {"T", p.train_interval},
          {"T_start", p.train_start},
          {"minibatch_size", p.minibatch_size},
          {"memory_capacity", p.memory_capacity},
          {"learning_rate", p.learning_rate},
          {"gradient_steps", p.gradient_steps},
          {"optimizer", std::string(to_string(p.optimizer))},
          {"target_sync_interval", p.target_sync_interval},
          {"pooled_bootstrap", p.pooled_bootstrap},
          {"rng_seed", p.rng_seed}};
}

PolicyState policy_from_json(const nlohmann::json& j) {
  PolicyState p;
  p.epsilon = j.at("epsilon").get<double>();
  p.epsilon_min = j.at("epsilon_min").get<double>();
  p.mu_dec = j.at("mu_dec").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.train_interval = j.at("T").get<int>();
  p.train_start = j.at("T_start").get<int>();
  p.minibatch_size = j.at("minibatch_size").get<std::size_t>();
  p.memory_capacity = j.at("memory_capacity").get<std::size_t>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.gradient_steps = j.value("gradient_steps", 1);
  p.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
  p.target_sync_interval = j.at("target_sync_interval").get<int>();
  p.pooled_bootstrap = j.value("pooled_bootstrap", false);
  p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return p;
}

}  // namespace

void save_checkpoint(const QNetwork& q, const PolicyState& policy, const ExtractorDescriptor& descriptor,
                     const std::filesystem::path& path) {
  nlohmann::json header;
  header["descriptor"] = {{"name", descriptor.name}, {"dim", descriptor.dim}, {"version", descriptor.version}};
  header["policy"] = policy_to_json(policy);
  header["input_dim"] = q.input_dim();
  header["hidden"] = q.hidden_widths();
  header["outputs"] = kNumQualityLevels;
  const auto params = q.flatten();
  header["parameter_count"] = params.size();
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> bytes(std::begin(kMagic), std::end(kMagic));
  put(bytes, kCheckpointMajor);
  put(bytes, kCheckpointMinor);
  put(bytes, static_cast<std::uint32_t>(header_text.size()));
  bytes.insert(bytes.end(), header_text.begin(), header_text.end());
  put(bytes, static_cast<std::uint64_t>(params.size()));
  for (double v : params) put(bytes, v);
  put(bytes, fnv1a(bytes, bytes.size()));

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write checkpoint " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<ExtractorDescriptor>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader reader(bytes);
  if (reader.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCode::kIoError, path.string() + " is not a checkpoint");
  }
  const auto major = reader.get<std::uint32_t>();
  reader.get<std::uint32_t>();  // minor: any value is readable
  if (major != kCheckpointMajor) {
    throw Error(ErrorCode::kVersionMismatch, "checkpoint format " + std::to_string(major) +
                                                 ".x, this build reads " + std::to_string(kCheckpointMajor) + ".x");
  }
  const auto header_len = reader.get<std::uint32_t>();
  const std::string header_text = reader.get_string(header_len);
  const auto count = reader.get<std::uint64_t>();
  if (count > (bytes.size() - reader.position()) / sizeof(double)) {
    throw Error(ErrorCode::kIoError, "checkpoint is truncated");
  }
  std::vector<double> params(count);
  for (auto& v : params) v = reader.get<double>();
  const std::size_t payload_end = reader.position();
  const auto checksum = reader.get<std::uint64_t>();
  if (checksum != fnv1a(bytes, payload_end)) {
    throw Error(ErrorCode::kIoError, "checkpoint checksum mismatch (file corrupt)");
  }

  Checkpoint ck;
  try {
    const auto header = nlohmann::json::parse(header_text);
    const auto& d = header.at("descriptor");
    ck.descriptor.name = d.at("name").get<std::string>();
    ck.descriptor.dim = d.at("dim").get<std::size_t>();
    ck.descriptor.version = d.at("version").get<int>();
    ck.policy = policy_from_json(header.at("policy"));
    ck.q = QNetwork(header.at("input_dim").get<std::size_t>(),
                    header.at("hidden").get<std::vector<std::size_t>>(), 0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("checkpoint header: ") + e.what());
  }
  if (expected && !(*expected == ck.descriptor)) {
    throw Error(ErrorCode::kExtractorMismatch,
                "checkpoint was trained with extractor " + ck.descriptor.name + " v" +
                    std::to_string(ck.descriptor.version) + " (dim " + std::to_string(ck.descriptor.dim) +
                    "), configured " + expected->name + " v" + std::to_string(expected->version) + " (dim " +
                    std::to_string(expected->dim) + ")");
  }
  if (ck.q.input_dim() != ck.descriptor.dim) {
    throw Error(ErrorCode::kIoError, "checkpoint network input does not match its descriptor");
  }
  if (ck.q.parameter_count() != params.size()) {
    throw Error(ErrorCode::kIoError, "checkpoint parameter count does not match its layer shapes");
  }
  ck.q.assign(params);
  return ck;
}

}  // namespace qualgate
