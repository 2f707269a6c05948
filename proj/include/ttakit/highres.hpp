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

// High-resolution pathway. A 224 crop of a 448-short-side image is simulated
// by taking a 128 crop of the 256-short-side image and upscaling it to 224
// (448 / 256 == 224 / 128 == 1.75).

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttakit/augment.hpp"
#include "ttakit/image.hpp"
#include "ttakit/rng.hpp"
#include "ttakit/views.hpp"

namespace ttakit {

inline constexpr int kHighResSourcePatch = 128;
inline constexpr int kNativeHighResSide = 448;

/// Replays the crop/upscale/flip of a simulated high-res patch.
inline Image render_highres_patch(const Image& normalized, const AugmentRecord& rec) {
  const Image small =
      crop(normalized, Rect{rec.crop_x, rec.crop_y, kHighResSourcePatch, kHighResSourcePatch});
  const Image up = resize_bicubic(small, kPatchSide, kPatchSide);
  return rec.flipped ? hflip(up) : up;
}

/// Draws crop_x, crop_y, flip (same order as sample_train_patch), then crops
/// 128x128 from the short-side-256 image and upscales to 224x224.
template <UniformSource S>
std::pair<Image, AugmentRecord> simulate_highres_patch(const Image& img, S& s) {
  const Image normalized = scale_smallest_side(img, kViewSide);
  AugmentRecord rec;
  rec.crop_x = draw_offset(s, normalized.width() - kHighResSourcePatch);
  rec.crop_y = draw_offset(s, normalized.height() - kHighResSourcePatch);
  rec.flipped = s.next_uniform() < 0.5;
  return {render_highres_patch(normalized, rec), rec};
}

/// Training patch from a true 448-short-side image: direct 224 crop.
template <UniformSource S>
std::pair<Image, AugmentRecord> sample_native_highres_patch(const Image& img, S& s) {
  return sample_train_patch(img, s, PatchConfig{kNativeHighResSide, kPatchSide});
}

/// 9 crops x 2 flips x 3 scales x 3 views.
inline std::vector<TransformDescriptor> highres_transform_set() {
  return enumerate_transforms(TransformSet::HighRes);
}

enum class ScheduleInit { Scratch, FromBaseModel };

struct SchedulePhase {
  double step_size = 0.0;
  bool dropout = true;

  friend bool operator==(const SchedulePhase&, const SchedulePhase&) = default;
};

struct TrainingSchedule {
  std::vector<SchedulePhase> phases;
  ScheduleInit init = ScheduleInit::Scratch;
  int epochs_budget = 0;

  /// Every change of step size is a decrease; a phase that keeps the step
  /// size must change the dropout setting instead.
  bool step_sizes_decreasing() const noexcept {
    for (std::size_t i = 1; i < phases.size(); ++i) {
      const auto& prev = phases[i - 1];
      const auto& cur = phases[i];
      if (cur.step_size > prev.step_size) return false;
      if (cur.step_size == prev.step_size && cur.dropout == prev.dropout) return false;
    }
    return true;
  }
};

/// Fine-tuning from a trained base model: start at 1e-3, reduce twice by 10,
/// dropout on for the first two phases and off for the rest.
/// The 1e-4 step size appears twice, once with and once without dropout.
inline TrainingSchedule default_highres_schedule() {
  return TrainingSchedule{{{1e-3, true}, {1e-4, true}, {1e-4, false}, {1e-5, false}},
                          ScheduleInit::FromBaseModel,
                          30};
}

inline void to_json(nlohmann::json& j, const TrainingSchedule& s) {
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : s.phases) phases.push_back({{"step_size", p.step_size}, {"dropout", p.dropout}});
  j = nlohmann::json{{"init", s.init == ScheduleInit::FromBaseModel ? "FromBaseModel" : "Scratch"},
                     {"epochs_budget", s.epochs_budget},
                     {"phases", phases}};
}

}  // namespace ttakit
