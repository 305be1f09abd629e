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

#include "qualgate/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "qualgate/codec.hpp"
#include "qualgate/error.hpp"
#include "qualgate/rng.hpp"

namespace qualgate {

SceneryStream SyntheticCorpus::stream() const {
  std::vector<StreamEntry> entries;
  entries.reserve(images.size());
  for (const auto& img : images) {
    StreamEntry e;
    e.source_id = img.source_id;
    e.scenery_id = scenery;
    e.image = img.image;
    entries.push_back(std::move(e));
  }
  return SceneryStream(std::move(entries));
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

}  // namespace

Raster render_texture_image(int width, int height, int texture_level, int levels, double brightness,
                            std::uint64_t seed) {
  Rng rng(mix64(seed));
  Raster img(width, height);

  // Smooth backdrop: a tinted linear gradient plus two soft blobs.
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double gx = std::cos(angle);
  const double gy = std::sin(angle);
  const double tint[3] = {rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2)};
  struct Blob {
    double cx, cy, r, amp;
  };
  Blob blobs[2];
  for (auto& b : blobs) {
    b = {rng.uniform(0.0, width), rng.uniform(0.0, height), rng.uniform(0.15, 0.4) * width,
         rng.uniform(-0.15, 0.15)};
  }

  // Texture: random high-frequency gratings plus pixel noise, with an
  // amplitude that grows with the texture level.
  const double strength = levels > 1 ? static_cast<double>(texture_level) / (levels - 1) : 0.0;
  const double amp = 0.02 + 0.30 * strength;
  struct Grating {
    double fx, fy, phase, weight;
  };
  Grating gratings[5];
  for (auto& g : gratings) {
    const double f = rng.uniform(0.2, 0.3) + 0.5 * strength;
    const double a = rng.uniform(0.0, std::numbers::pi);
    g = {f * std::cos(a), f * std::sin(a), rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.5, 1.0)};
  }
  const double noise_amp = amp * (0.3 + 0.7 * strength);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = (x - width / 2.0) / width;
      const double v = (y - height / 2.0) / height;
      double base = brightness + 0.25 * (gx * u + gy * v);
      for (const auto& b : blobs) {
        const double d2 = ((x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy)) / (b.r * b.r);
        base += b.amp * std::exp(-d2);
      }
      double tex = 0.0;
      for (const auto& g : gratings) tex += g.weight * std::sin(g.fx * x + g.fy * y + g.phase);
      tex = tex / 5.0 * amp + noise_amp * (rng.uniform() - 0.5);
      std::uint8_t* px = img.at(x, y);
      for (int c = 0; c < 3; ++c) px[c] = to_byte((base + tex) * tint[c] * (0.6 + 0.4 * brightness));
    }
  }
  return img;
}

SyntheticCorpus make_corpus(const SceneryProfile& profile, const CorpusOptions& options) {
  const int levels = static_cast<int>(profile.fragility_by_level.size());
  if (levels == 0) throw Error(ErrorCode::kConfigError, "scenery profile has no texture levels");
  for (int q : profile.fragility_by_level) QualityLevel::from_value(q);
  std::vector<double> weights = profile.level_weights;
  if (weights.empty()) weights.assign(static_cast<std::size_t>(levels), 1.0);
  if (weights.size() != static_cast<std::size_t>(levels)) {
    throw Error(ErrorCode::kConfigError, "level_weights must match fragility_by_level");
  }
  double total = 0.0;
  for (double w : weights) total += w;

  SyntheticCorpus corpus;
  corpus.scenery = profile.name;
  corpus.oracle.noise = options.noise;
  corpus.oracle.seed = options.seed;
  Rng rng(mix64(options.seed ^ std::hash<std::string>{}(profile.name)));
  static constexpr const char* kClasses[] = {"tabby cat", "golden retriever", "sports car", "espresso",
                                             "lighthouse", "mountain bike", "pizza", "daisy",
                                             "container ship", "grand piano", "volcano", "red fox"};
  for (std::size_t i = 0; i < options.count; ++i) {
    double pick = rng.uniform() * total;
    int level = 0;
    while (level + 1 < levels && pick >= weights[static_cast<std::size_t>(level)]) {
      pick -= weights[static_cast<std::size_t>(level)];
      ++level;
    }
    SyntheticImage img;
    img.source_id = options.id_prefix + "-" + profile.name + "-" + std::to_string(i);
    img.label = kClasses[rng.below(std::size(kClasses))];
    img.texture_level = level;
    img.fragility = profile.fragility_by_level[static_cast<std::size_t>(level)];
    const double brightness = rng.uniform(profile.brightness_lo, profile.brightness_hi);
    img.image = std::make_shared<const Raster>(
        render_texture_image(options.width, options.height, level, levels, brightness, rng.next()));
    corpus.oracle.labels[img.source_id] = img.label;
    corpus.oracle.fragility[img.source_id] = img.fragility;
    corpus.images.push_back(std::move(img));
  }
  return corpus;
}

OracleSpec merge_oracles(const std::vector<const SyntheticCorpus*>& corpora, std::uint64_t seed, double noise) {
  std::vector<OracleSpec> specs;
  for (const auto* c : corpora) specs.push_back(c->oracle);
  OracleSpec out = merge_oracle_specs(specs);
  out.seed = seed;
  out.noise = noise;
  return out;
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw Error(ErrorCode::kIoError, "cannot write manifest in " + dir.string());
  manifest << "# path scenery_id\n";
  for (const auto& img : corpus.images) {
    const std::string file = img.source_id + ".png";
    save_png(*img.image, dir / file);
    manifest << file << ' ' << corpus.scenery << '\n';
  }
  std::ofstream oracle(dir / "oracle.json");
  if (!oracle) throw Error(ErrorCode::kIoError, "cannot write oracle spec in " + dir.string());
  oracle << dump_oracle_spec(corpus.oracle) << '\n';
}

SceneryProfile builtin_profile(const std::string& name) {
  SceneryProfile p;
  p.name = name;
  if (name == "day") {
    p.fragility_by_level = {75, 55, 35, 25, 15, 5};
    p.brightness_lo = 0.45;
    p.brightness_hi = 0.8;
  } else if (name == "night") {
    p.fragility_by_level = {55, 35, 25, 15, 5, 5};
    p.brightness_lo = 0.1;
    p.brightness_hi = 0.35;
  } else {
    throw Error(ErrorCode::kConfigError, "unknown scenery profile '" + name + "'");
  }
  return p;
}

}  // namespace qualgate
