// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Procedural stand-in dataset: one sprite per image, its shape and tint
// being the class, placed anywhere on a noisy dark 256xN (or Nx256) canvas. Most
// sprites sit away from the center view, which is what makes multi-view
// test-time prediction matter.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "ttakit/error.hpp"
#include "ttakit/image.hpp"
#include "ttakit/manifest.hpp"
#include "ttakit/ppm.hpp"
#include "ttakit/rng.hpp"
#include "ttakit/views.hpp"

namespace ttakit {

inline constexpr int kSynthShapes = 8;
/// Class tint; each sprite jitters it by up to +-35 per channel.
inline constexpr std::array<std::array<int, 3>, kSynthShapes> kSynthPalette{{
    {230, 60, 60}, {60, 220, 60}, {70, 90, 240}, {230, 220, 50},
    {220, 60, 220}, {50, 220, 220}, {240, 140, 40}, {230, 230, 230}}};
inline constexpr int kSynthMinRadius = 36;
inline constexpr int kSynthMaxRadius = 60;

/// Whether offset (dx, dy) from the sprite center falls inside shape
/// `cls` of radius r. Classes beyond the eight base shapes reuse them
/// rotated.
inline bool sprite_covers(int cls, double dx, double dy, double r) noexcept {
  const double angle = (cls / kSynthShapes) * 0.35;
  if (angle != 0.0) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double rx = c * dx + s * dy;
    dy = -s * dx + c * dy;
    dx = rx;
  }
  const double ax = std::abs(dx), ay = std::abs(dy);
  switch (cls % kSynthShapes) {
    case 0: return dx * dx + dy * dy <= r * r;                         // disk
    case 1: return ax <= 0.8 * r && ay <= 0.8 * r;                     // square
    case 2: return dy <= 0.8 * r && dy >= -r && ax <= (dy + r) * 0.5;  // triangle
    case 3: return (ax <= 0.3 * r && ay <= r) || (ay <= 0.3 * r && ax <= r);  // plus
    case 4: {                                                          // ring
      const double d2 = dx * dx + dy * dy;
      return d2 <= r * r && d2 >= 0.36 * r * r;
    }
    case 5: return ax <= r && ay <= 0.35 * r;                          // horizontal bar
    case 6: return ax <= 0.35 * r && ay <= r;                          // vertical bar
    default: return ax + ay <= r;                                      // diamond
  }
}

inline void paint_sprite(Image& img, int cls, double cx, double cy, double r,
                         const std::array<std::uint8_t, 3>& color) {
  const int reach = static_cast<int>(std::ceil(1.5 * r));
  const int x0 = std::max(0, static_cast<int>(cx) - reach);
  const int x1 = std::min(img.width() - 1, static_cast<int>(cx) + reach);
  const int y0 = std::max(0, static_cast<int>(cy) - reach);
  const int y1 = std::min(img.height() - 1, static_cast<int>(cy) + reach);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (sprite_covers(cls, x + 0.5 - cx, y + 0.5 - cy, r)) {
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[static_cast<std::size_t>(c)];
      }
    }
  }
}

struct SynthSample {
  std::string id;
  Image image;
  int label = 0;
};

inline std::string synth_image_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth_%05zu", index);
  return buf;
}

/// Image `index` of the dataset for `seed`; independent of every other index.
inline SynthSample synth_sample(std::uint64_t seed, std::size_t index, int classes) {
  if (classes < 2) throw InvalidArgument("synthetic dataset needs at least two classes");
  SynthSample out;
  out.id = synth_image_id(index);
  RngStream s = derive_stream(seed, out.id);
  const auto uniform_int = [&](int lo, int hi) {
    return lo + std::min(static_cast<int>(s.next_uniform() * (hi - lo + 1)), hi - lo);
  };
  out.label = uniform_int(0, classes - 1);
  const int long_side = uniform_int(kViewSide, 2 * kViewSide);
  const bool landscape = s.next_uniform() < 0.5;
  const int w = landscape ? long_side : kViewSide;
  const int h = landscape ? kViewSide : long_side;

  const int background = uniform_int(30, 100);
  Image img(w, h);
  for (auto& v : img.samples()) v = static_cast<std::uint8_t>(background + uniform_int(-25, 25));

  const double r = uniform_int(kSynthMinRadius, kSynthMaxRadius);
  const double cx = r + s.next_uniform() * (w - 2 * r);
  const double cy = r + s.next_uniform() * (h - 2 * r);
  std::array<std::uint8_t, 3> color{};
  for (std::size_t c = 0; c < 3; ++c) {
    const int tint = kSynthPalette[static_cast<std::size_t>(out.label % kSynthShapes)][c];
    color[c] = static_cast<std::uint8_t>(std::clamp(tint + uniform_int(-35, 35), 0, 255));
  }
  paint_sprite(img, out.label, cx, cy, r, color);
  out.image = std::move(img);
  return out;
}

/// Canonical 224x224 rendering of one class: centered sprite, mid radius,
/// flat background. Used to build toy-predictor templates.
inline Image synth_prototype(int cls) {
  Image img(kPatchSide, kPatchSide, 65);
  const double mid = kPatchSide / 2.0;
  const auto& tint = kSynthPalette[static_cast<std::size_t>(cls % kSynthShapes)];
  paint_sprite(img, cls, mid, mid, (kSynthMinRadius + kSynthMaxRadius) / 2.0,
               {static_cast<std::uint8_t>(tint[0]), static_cast<std::uint8_t>(tint[1]),
                static_cast<std::uint8_t>(tint[2])});
  return img;
}

struct SynthDataset {
  std::vector<ManifestEntry> images;
  std::vector<ManifestEntry> prototypes;
};

/// Writes images/<id>.ppm, manifest.jsonl, prototypes/class_<k>.ppm and
/// prototypes.jsonl under `out_dir`.
inline SynthDataset synth_dataset(std::uint64_t seed, std::size_t n_images, int classes,
                                  const std::filesystem::path& out_dir) {
  if (classes < 2) throw InvalidArgument("synthetic dataset needs at least two classes");
  std::filesystem::create_directories(out_dir / "images");
  std::filesystem::create_directories(out_dir / "prototypes");
  SynthDataset ds;
  for (std::size_t i = 0; i < n_images; ++i) {
    auto sample = synth_sample(seed, i, classes);
    const auto path = out_dir / "images" / (sample.id + ".ppm");
    write_ppm_file(path, sample.image);
    ds.images.push_back({sample.id, path, sample.label});
  }
  for (int k = 0; k < classes; ++k) {
    const std::string id = "class_" + std::to_string(k);
    const auto path = out_dir / "prototypes" / (id + ".ppm");
    write_ppm_file(path, synth_prototype(k));
    ds.prototypes.push_back({id, path, k});
  }
  write_manifest(out_dir / "manifest.jsonl", ds.images);
  write_manifest(out_dir / "prototypes.jsonl", ds.prototypes);
  return ds;
}

}  // namespace ttakit
