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

// Training-time augmentation: random crops over the whole short-side-256
// image, random horizontal flips, PIL-style enhancement blends applied in a
// random order, and PCA lighting noise.
//
// Randomness is consumed in a fixed order so a stream state fully determines
// the output:
//   sample_train_patch   crop_x, crop_y, flip              (3 uniforms)
//   apply_color_jitter   permutation (2 uniforms), factors for Contrast,
//                        Brightness, Color (3 uniforms), alphas (3 gaussians,
//                        6 uniforms)

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "ttakit/eigen3.hpp"
#include "ttakit/error.hpp"
#include "ttakit/image.hpp"
#include "ttakit/rng.hpp"

namespace ttakit {

enum class EnhancementKind { Contrast, Brightness, Color };

inline constexpr std::array<EnhancementKind, 3> kEnhancementKinds{
    EnhancementKind::Contrast, EnhancementKind::Brightness, EnhancementKind::Color};

inline std::string_view to_string(EnhancementKind k) noexcept {
  switch (k) {
    case EnhancementKind::Contrast: return "contrast";
    case EnhancementKind::Brightness: return "brightness";
    case EnhancementKind::Color: return "color";
  }
  return "?";
}

inline EnhancementKind enhancement_from_string(std::string_view s) {
  for (const auto k : kEnhancementKinds) {
    if (to_string(k) == s) return k;
  }
  throw FormatError("unknown enhancement kind '" + std::string(s) + "'");
}

/// Principal components of the RGB pixel distribution.
struct LightingModel {
  Vec3 eigenvalues{};  // descending, >= 0
  Mat3 eigenvectors{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};  // columns
  double sigma = 0.1;

  void validate() const {
    if (!(sigma >= 0.0)) throw InvalidArgument("lighting sigma must be non-negative");
    for (int i = 0; i < 3; ++i) {
      if (!(eigenvalues[i] >= 0.0)) throw InvalidArgument("lighting eigenvalues must be >= 0");
      if (i > 0 && eigenvalues[i] > eigenvalues[i - 1]) {
        throw InvalidArgument("lighting eigenvalues must be sorted descending");
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += eigenvectors[k][i] * eigenvectors[k][j];
        if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-6) {
          throw InvalidArgument("lighting eigenvectors are not orthonormal");
        }
      }
    }
  }
};

/// Random choices made by apply_color_jitter.
struct JitterDraw {
  std::array<EnhancementKind, 3> order = kEnhancementKinds;
  std::array<double, 3> factors{1.0, 1.0, 1.0};  // indexed Contrast, Brightness, Color
  Vec3 alphas{};
};

/// Everything sampled for one training patch; replaying it needs no RNG.
struct AugmentRecord {
  int crop_x = 0;
  int crop_y = 0;
  bool flipped = false;
  JitterDraw jitter;
};

struct PatchConfig {
  int base = 256;
  int patch = 224;
};

/// Rec. 601 luma, rounded half up.
inline int luminance(int r, int g, int b) noexcept {
  return static_cast<int>(std::floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5));
}

/// PIL ImageEnhance semantics: blend between a degenerate image and the
/// original, `degenerate * (1 - factor) + original * factor`.
///   Brightness: black.
///   Color:      per-pixel grayscale luma in all three channels.
///   Contrast:   constant gray at the rounded mean luma.
inline Image enhance(const Image& img, EnhancementKind kind, double factor) {
  if (!(factor >= 0.0)) throw InvalidArgument("enhancement factor must be non-negative");
  Image out(img.width(), img.height());
  const auto src = img.samples();
  auto dst = out.samples();
  const std::size_t pixels = src.size() / 3;
  const double keep = 1.0 - factor;

  switch (kind) {
    case EnhancementKind::Brightness:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_sample(src[i] * factor);
      break;
    case EnhancementKind::Color:
      for (std::size_t p = 0; p < pixels; ++p) {
        const int l = luminance(src[3 * p], src[3 * p + 1], src[3 * p + 2]);
        for (int c = 0; c < 3; ++c) dst[3 * p + c] = to_sample(l * keep + src[3 * p + c] * factor);
      }
      break;
    case EnhancementKind::Contrast: {
      double sum = 0.0;
      for (std::size_t p = 0; p < pixels; ++p) {
        sum += luminance(src[3 * p], src[3 * p + 1], src[3 * p + 2]);
      }
      const double gray = std::floor(sum / static_cast<double>(pixels) + 0.5);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_sample(gray * keep + src[i] * factor);
      break;
    }
  }
  return out;
}

/// The RGB offset P * (alpha_i * lambda_i).
inline Vec3 lighting_delta(const LightingModel& model, const Vec3& alphas) noexcept {
  Vec3 delta{};
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) {
      delta[r] += model.eigenvectors[r][k] * alphas[k] * model.eigenvalues[k];
    }
  }
  return delta;
}

/// Adds one RGB offset to every pixel, rounding and clamping per sample.
inline Image apply_lighting_noise(const Image& img, const LightingModel& model, const Vec3& alphas) {
  const Vec3 delta = lighting_delta(model, alphas);
  Image out(img.width(), img.height());
  const auto src = img.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_sample(src[i] + delta[i % 3]);
  return out;
}

/// Covariance eigenstructure of an RGB sample (unbiased covariance, n - 1).
inline LightingModel fit_lighting_model(std::span<const Vec3> pixels, double sigma) {
  if (pixels.size() < 2) throw InvalidArgument("lighting model needs at least two pixels");
  if (!(sigma >= 0.0)) throw InvalidArgument("lighting sigma must be non-negative");
  Vec3 mean{};
  for (const auto& p : pixels) {
    for (int c = 0; c < 3; ++c) mean[c] += p[c];
  }
  for (auto& m : mean) m /= static_cast<double>(pixels.size());
  Mat3 cov{};
  for (const auto& p : pixels) {
    const Vec3 d{p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]};
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) cov[i][j] += d[i] * d[j];
    }
  }
  const double norm = 1.0 / static_cast<double>(pixels.size() - 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) cov[j][i] = cov[i][j] *= norm;
  }
  const auto eig = jacobi_eigen3(cov, 1e-10);
  LightingModel model;
  model.eigenvalues = eig.values;
  // Rounding can leave a zero eigenvalue at -1e-17 or so.
  for (auto& v : model.eigenvalues) v = std::max(v, 0.0);
  model.eigenvectors = eig.vectors;
  model.sigma = sigma;
  return model;
}

/// Deterministic re-application of a jitter draw.
inline Image apply_jitter(const Image& img, const JitterDraw& draw, const LightingModel& model) {
  Image out = img;
  for (const auto kind : draw.order) {
    out = enhance(out, kind, draw.factors[static_cast<std::size_t>(kind)]);
  }
  return apply_lighting_noise(out, model, draw.alphas);
}

template <UniformSource S>
JitterDraw draw_color_jitter(S& s, const LightingModel& model) {
  JitterDraw draw;
  // Fisher-Yates over three elements: two draws.
  for (int i = 2; i >= 1; --i) {
    const int j = std::min(static_cast<int>(s.next_uniform() * (i + 1)), i);
    std::swap(draw.order[static_cast<std::size_t>(i)], draw.order[static_cast<std::size_t>(j)]);
  }
  for (auto& f : draw.factors) f = 0.5 + s.next_uniform();
  for (auto& a : draw.alphas) a = next_gaussian(s, 0.0, model.sigma);
  return draw;
}

template <UniformSource S>
std::pair<Image, JitterDraw> apply_color_jitter(const Image& img, S& s, const LightingModel& model) {
  JitterDraw draw = draw_color_jitter(s, model);
  return {apply_jitter(img, draw, model), draw};
}

/// Crop and flip recorded in `rec`, applied to an already-normalized image.
inline Image render_train_patch(const Image& normalized, const AugmentRecord& rec, int patch) {
  Image out = crop(normalized, Rect{rec.crop_x, rec.crop_y, patch, patch});
  return rec.flipped ? hflip(out) : out;
}

/// Uniform offset in {0..range}: floor(u * (range + 1)).
template <UniformSource S>
int draw_offset(S& s, int range) {
  return std::min(static_cast<int>(s.next_uniform() * (range + 1)), range);
}

/// Scales the short side to `cfg.base`, then draws crop_x, crop_y and a flip.
template <UniformSource S>
std::pair<Image, AugmentRecord> sample_train_patch(const Image& img, S& s, PatchConfig cfg = {}) {
  if (cfg.patch < 1 || cfg.base < cfg.patch) {
    throw InvalidArgument("patch size must be in [1, base]");
  }
  const Image normalized = scale_smallest_side(img, cfg.base);
  AugmentRecord rec;
  rec.crop_x = draw_offset(s, normalized.width() - cfg.patch);
  rec.crop_y = draw_offset(s, normalized.height() - cfg.patch);
  rec.flipped = s.next_uniform() < 0.5;
  return {render_train_patch(normalized, rec, cfg.patch), rec};
}

/// Full training sample: patch, then color jitter on the patch.
template <UniformSource S>
std::pair<Image, AugmentRecord> augment_example(const Image& img, S& s, const LightingModel& model,
                                                PatchConfig cfg = {}) {
  auto [patch, rec] = sample_train_patch(img, s, cfg);
  auto [jittered, draw] = apply_color_jitter(patch, s, model);
  rec.jitter = draw;
  return {std::move(jittered), rec};
}

inline Image replay_augment(const Image& img, const AugmentRecord& rec, const LightingModel& model,
                            PatchConfig cfg = {}) {
  const Image normalized = scale_smallest_side(img, cfg.base);
  return apply_jitter(render_train_patch(normalized, rec, cfg.patch), rec.jitter, model);
}

// JSON forms used by the CLI sidecars and the lighting model file.

inline void to_json(nlohmann::json& j, const LightingModel& m) {
  j = nlohmann::json{{"eigenvalues", m.eigenvalues}, {"eigenvectors", m.eigenvectors},
                     {"sigma", m.sigma}};
}

inline void from_json(const nlohmann::json& j, LightingModel& m) {
  j.at("eigenvalues").get_to(m.eigenvalues);
  j.at("eigenvectors").get_to(m.eigenvectors);
  m.sigma = j.value("sigma", 0.1);
  m.validate();
}

inline void to_json(nlohmann::json& j, const AugmentRecord& r) {
  nlohmann::json order = nlohmann::json::array();
  for (const auto k : r.jitter.order) order.push_back(to_string(k));
  j = nlohmann::json{{"crop_x", r.crop_x},
                     {"crop_y", r.crop_y},
                     {"flipped", r.flipped},
                     {"order", order},
                     {"factors", r.jitter.factors},
                     {"alphas", r.jitter.alphas}};
}

inline void from_json(const nlohmann::json& j, AugmentRecord& r) {
  j.at("crop_x").get_to(r.crop_x);
  j.at("crop_y").get_to(r.crop_y);
  j.at("flipped").get_to(r.flipped);
  const auto& order = j.at("order");
  if (!order.is_array() || order.size() != 3) throw FormatError("order must list three kinds");
  for (std::size_t i = 0; i < 3; ++i) {
    r.jitter.order[i] = enhancement_from_string(order[i].get<std::string>());
  }
  j.at("factors").get_to(r.jitter.factors);
  j.at("alphas").get_to(r.jitter.alphas);
}

}  // namespace ttakit
