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

#include "qualgate/stream.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qualgate/error.hpp"
#include "qualgate/rng.hpp"

namespace qualgate {

std::vector<StreamEntry> read_manifest(const std::filesystem::path& manifest,
                                       const std::string& default_scenery) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + manifest.string());
  const auto base = manifest.parent_path();
  std::vector<StreamEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    StreamEntry entry;
    entry.scenery_id = default_scenery;
    std::string path;
    if (line[first] == '{') {
      try {
        const auto doc = nlohmann::json::parse(line);
        path = doc.at("path").get<std::string>();
        entry.scenery_id = doc.value("scenery_id", default_scenery);
        entry.source_id = doc.value("id", std::string{});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kConfigError, manifest.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      std::istringstream fields(line);
      fields >> path;
      std::string scenery;
      if (fields >> scenery) entry.scenery_id = scenery;
    }
    std::filesystem::path p(path);
    entry.path = p.is_absolute() ? p : base / p;
    if (entry.source_id.empty()) entry.source_id = p.stem().string();
    out.push_back(std::move(entry));
  }
  return out;
}

SceneryStream SceneryStream::from_manifests(const std::vector<std::filesystem::path>& manifests) {
  SceneryStream stream;
  for (const auto& m : manifests) {
    stream.append(SceneryStream(read_manifest(m, m.stem().string())));
  }
  return stream;
}

void SceneryStream::append(const SceneryStream& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

void SceneryStream::shuffle_within_sceneries(std::uint64_t seed) {
  Rng rng(mix64(seed ^ 0x5CE7E5ULL));
  std::size_t begin = 0;
  while (begin < entries_.size()) {
    std::size_t end = begin + 1;
    while (end < entries_.size() && entries_[end].scenery_id == entries_[begin].scenery_id) ++end;
    for (std::size_t i = end - 1; i > begin; --i) {
      const std::size_t j = begin + static_cast<std::size_t>(rng.below(i - begin + 1));
      std::swap(entries_[i], entries_[j]);
    }
    begin = end;
  }
}

std::optional<StreamItem> SceneryStream::next_image() {
  if (position_ >= entries_.size()) return std::nullopt;
  const auto& entry = entries_[position_];
  StreamItem item;
  item.image = entry.image ? *entry.image : load_image(entry.path);
  item.source_id = entry.source_id;
  item.scenery_id = entry.scenery_id;
  item.position = position_;
  ++position_;
  return item;
}

}  // namespace qualgate
