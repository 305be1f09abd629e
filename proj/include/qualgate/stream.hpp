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

#ifndef QUALGATE_STREAM_HPP_
#define QUALGATE_STREAM_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qualgate/image.hpp"

namespace qualgate {

struct StreamEntry {
  std::string source_id;
  std::string scenery_id;
  // Exactly one of path / image is used; in-memory entries skip the disk.
  std::filesystem::path path;
  std::shared_ptr<const Raster> image;
};

struct StreamItem {
  Raster image;
  std::string source_id;
  std::string scenery_id;
  std::size_t position = 0;
};

// Reads a manifest. Each non-blank, non-'#' line is either a JSON object
// {"path": ..., "scenery_id": ..., "id": ...} or "path [scenery_id]".
// Relative paths resolve against the manifest's directory; the id defaults
// to the file stem and the scenery to default_scenery.
std::vector<StreamEntry> read_manifest(const std::filesystem::path& manifest,
                                       const std::string& default_scenery = "default");

// Ordered image supplier for one deployment. Replays deterministically.
class SceneryStream {
 public:
  SceneryStream() = default;
  explicit SceneryStream(std::vector<StreamEntry> entries) : entries_(std::move(entries)) {}

  static SceneryStream from_manifests(const std::vector<std::filesystem::path>& manifests);

  // Appends another segment (e.g. a second scenery) after this one.
  void append(const SceneryStream& other);
  // Deterministically permutes entries within each maximal run of one
  // scenery_id, so concatenated sceneries keep their boundaries.
  void shuffle_within_sceneries(std::uint64_t seed);

  // Empty optional is end of stream.
  std::optional<StreamItem> next_image();
  void rewind() { position_ = 0; }

  std::size_t size() const { return entries_.size(); }
  std::size_t position() const { return position_; }
  const std::vector<StreamEntry>& entries() const { return entries_; }

 private:
  std::vector<StreamEntry> entries_;
  std::size_t position_ = 0;
};

}  // namespace qualgate

#endif  // QUALGATE_STREAM_HPP_
