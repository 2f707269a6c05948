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

// Test-time prediction sources: square views along the long axis, each
// resampled to one of three scales, cropped at a named position and
// optionally mirrored.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttakit/error.hpp"
#include "ttakit/image.hpp"

namespace ttakit {

inline constexpr int kViewSide = 256;
inline constexpr int kPatchSide = 224;
/// Native scale first so transform 0 is the classic center crop.
inline constexpr std::array<int, 3> kTestScales{256, 228, 284};

enum class ViewKind { First, Center, Last };
enum class CropPosition { TL, TR, BL, BR, Center, MT, MB, ML, MR };
enum class TransformSet { Base, HighRes };

inline constexpr std::array<ViewKind, 3> kViewOrder{ViewKind::Center, ViewKind::First,
                                                    ViewKind::Last};
inline constexpr std::array<CropPosition, 5> kBaseCrops{
    CropPosition::Center, CropPosition::TL, CropPosition::TR, CropPosition::BL, CropPosition::BR};
inline constexpr std::array<CropPosition, 9> kHighResCrops{
    CropPosition::Center, CropPosition::TL, CropPosition::TR, CropPosition::BL, CropPosition::BR,
    CropPosition::MT,     CropPosition::MB, CropPosition::ML, CropPosition::MR};

inline std::string_view to_string(ViewKind v) noexcept {
  switch (v) {
    case ViewKind::First: return "first";
    case ViewKind::Center: return "center";
    case ViewKind::Last: return "last";
  }
  return "?";
}

inline std::string_view to_string(CropPosition p) noexcept {
  constexpr std::array<std::string_view, 9> names{"TL", "TR", "BL", "BR", "C",
                                                  "MT", "MB", "ML", "MR"};
  return names[static_cast<std::size_t>(p)];
}

inline std::string_view to_string(TransformSet s) noexcept {
  return s == TransformSet::Base ? "base" : "highres";
}

inline TransformSet transform_set_from_string(std::string_view s) {
  if (s == "base") return TransformSet::Base;
  if (s == "highres") return TransformSet::HighRes;
  throw InvalidArgument("unknown transform set '" + std::string(s) + "' (expected base|highres)");
}

struct TransformDescriptor {
  ViewKind view = ViewKind::Center;
  int scale = kViewSide;
  CropPosition crop = CropPosition::Center;
  bool flip = false;
  int id = 0;

  friend bool operator==(const TransformDescriptor&, const TransformDescriptor&) = default;
};

/// Views outer, then scales, crops, flips. `id` is the position in this order.
inline std::vector<TransformDescriptor> enumerate_transforms(TransformSet set) {
  const std::span<const CropPosition> crops =
      set == TransformSet::Base ? std::span<const CropPosition>(kBaseCrops)
                                : std::span<const CropPosition>(kHighResCrops);
  std::vector<TransformDescriptor> out;
  out.reserve(kViewOrder.size() * kTestScales.size() * crops.size() * 2);
  for (const auto view : kViewOrder) {
    for (const int scale : kTestScales) {
      for (const auto crop : crops) {
        for (const bool flip : {false, true}) {
          out.push_back({view, scale, crop, flip, static_cast<int>(out.size())});
        }
      }
    }
  }
  return out;
}

inline std::size_t transform_count(TransformSet set) noexcept {
  return kViewOrder.size() * kTestScales.size() * (set == TransformSet::Base ? 5 : 9) * 2;
}

/// Three `side` x `side` windows along the long axis: flush start, centered
/// (floor), flush end. Square images yield three identical rects.
inline std::array<std::pair<ViewKind, Rect>, 3> enumerate_views(const Image& img,
                                                               int side = kViewSide) {
  const int w = img.width();
  const int h = img.height();
  if (std::min(w, h) != side) {
    throw InvalidArgument("views need the short side normalized to " + std::to_string(side) +
                          ", got " + std::to_string(w) + "x" + std::to_string(h));
  }
  const bool landscape = w >= h;
  const int slack = (landscape ? w : h) - side;
  const std::array<int, 3> offsets{0, slack / 2, slack};
  const std::array<ViewKind, 3> kinds{ViewKind::First, ViewKind::Center, ViewKind::Last};
  std::array<std::pair<ViewKind, Rect>, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const Rect r = landscape ? Rect{offsets[i], 0, side, side} : Rect{0, offsets[i], side, side};
    out[i] = {kinds[i], r};
  }
  return out;
}

inline Rect view_rect(const Image& img, ViewKind view, int side = kViewSide) {
  for (const auto& [kind, rect] : enumerate_views(img, side)) {
    if (kind == view) return rect;
  }
  return {};  // unreachable: every kind is enumerated
}

/// Top-left corner of a `patch` crop inside a `side` x `side` square.
/// Corners are flush, Center sits at floor((side - patch) / 2), and the
/// edge-middle crops are flush on one axis and centered on the other.
inline std::pair<int, int> crop_origin(CropPosition pos, int side, int patch = kPatchSide) {
  if (side < patch) throw InvalidArgument("scale smaller than the patch size");
  const int far = side - patch;
  const int mid = far / 2;
  switch (pos) {
    case CropPosition::TL: return {0, 0};
    case CropPosition::TR: return {far, 0};
    case CropPosition::BL: return {0, far};
    case CropPosition::BR: return {far, far};
    case CropPosition::Center: return {mid, mid};
    case CropPosition::MT: return {mid, 0};
    case CropPosition::MB: return {mid, far};
    case CropPosition::ML: return {0, mid};
    case CropPosition::MR: return {far, mid};
  }
  return {mid, mid};
}

/// Final crop + flip stage, given the view already resampled to d.scale.
inline Image crop_scaled_view(const Image& scaled_view, const TransformDescriptor& d) {
  const auto [x, y] = crop_origin(d.crop, scaled_view.width());
  Image out = crop(scaled_view, Rect{x, y, kPatchSide, kPatchSide});
  return d.flip ? hflip(out) : out;
}

inline Image scaled_view(const Image& img, ViewKind view, int scale) {
  const Image square = crop(img, view_rect(img, view));
  return scale == kViewSide ? square : resize_bicubic(square, scale, scale);
}

/// view rect -> resize to scale x scale -> 224 crop -> optional mirror.
inline Image render_patch(const Image& img, const TransformDescriptor& d) {
  return crop_scaled_view(scaled_view(img, d.view, d.scale), d);
}

/// Every patch of the set, in id order. Each (view, scale) pair is resampled
/// once and shared by its crops.
inline std::vector<Image> render_all(const Image& img, TransformSet set) {
  const auto descriptors = enumerate_transforms(set);
  std::vector<Image> out;
  out.reserve(descriptors.size());
  Image cache;
  ViewKind cached_view{};
  int cached_scale = 0;
  for (const auto& d : descriptors) {
    if (cache.empty() || cached_view != d.view || cached_scale != d.scale) {
      cache = scaled_view(img, d.view, d.scale);
      cached_view = d.view;
      cached_scale = d.scale;
    }
    out.push_back(crop_scaled_view(cache, d));
  }
  return out;
}

inline void to_json(nlohmann::json& j, const TransformDescriptor& d) {
  j = nlohmann::json{{"id", d.id},
                     {"view", to_string(d.view)},
                     {"scale", d.scale},
                     {"crop", to_string(d.crop)},
                     {"flip", d.flip}};
}

}  // namespace ttakit
