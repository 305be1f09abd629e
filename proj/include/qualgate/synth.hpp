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

#ifndef QUALGATE_SYNTH_HPP_
#define QUALGATE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qualgate/backend.hpp"
#include "qualgate/image.hpp"
#include "qualgate/stream.hpp"

namespace qualgate {

// Procedural test scenery. Each image gets a texture level; busier texture
// survives coarser quantization, so its fragility threshold q* is lower.
// A scenery is a brightness range plus a table from texture level to q*.
struct SceneryProfile {
  std::string name = "day";
  // q* for texture level i (level 0 = smoothest). Must be ladder values.
  std::vector<int> fragility_by_level = {75, 55, 35, 25, 15, 5};
  // Relative frequency of each level; defaults to uniform when empty.
  std::vector<double> level_weights;
  double brightness_lo = 0.35;
  double brightness_hi = 0.75;
};

struct CorpusOptions {
  std::size_t count = 100;
  int width = 128;
  int height = 128;
  std::uint64_t seed = 1;
  double noise = 0.0;  // oracle label-flip probability
  std::string id_prefix = "img";
};

struct SyntheticImage {
  std::string source_id;
  std::string label;
  int texture_level = 0;
  int fragility = 75;
  std::shared_ptr<const Raster> image;
};

struct SyntheticCorpus {
  std::string scenery;
  std::vector<SyntheticImage> images;
  OracleSpec oracle;

  SceneryStream stream() const;
};

Raster render_texture_image(int width, int height, int texture_level, int levels, double brightness,
                            std::uint64_t seed);

SyntheticCorpus make_corpus(const SceneryProfile& profile, const CorpusOptions& options);

// Merges oracle specs of several corpora (ids must not collide).
OracleSpec merge_oracles(const std::vector<const SyntheticCorpus*>& corpora, std::uint64_t seed, double noise);

// Writes <dir>/<id>.png for every image, <dir>/manifest.txt and
// <dir>/oracle.json.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

// Built-in profiles used by tests and the CLI: "day" and "night" differ in
// brightness and in how fragile a given texture level is.
SceneryProfile builtin_profile(const std::string& name);

}  // namespace qualgate

#endif  // QUALGATE_SYNTH_HPP_
