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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ttakit/error.hpp"

namespace ttakit {

/// Owned 8-bit RGB raster, row-major, channels interleaved.
///
/// A default-constructed Image is the empty 0x0 placeholder; every other
/// instance has width and height of at least one.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;

  Image(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.assign(sample_count(), fill);
  }

  Image(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != sample_count()) {
      throw InvalidArgument("pixel buffer holds " + std::to_string(pixels_.size()) +
                            " samples, expected " + std::to_string(sample_count()));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_) * kChannels;
  }

  std::span<const std::uint8_t> samples() const noexcept { return pixels_; }
  std::span<std::uint8_t> samples() noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c) const noexcept { return pixels_[offset(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) noexcept { return pixels_[offset(x, y, c)]; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                            "x" + std::to_string(height));
    }
  }

  std::size_t offset(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels + static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Round half up, then saturate to the 8-bit sample range.
inline std::uint8_t to_sample(double v) noexcept {
  v = std::clamp(v, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

inline Image crop(const Image& img, const Rect& r) {
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x > img.width() - r.w ||
      r.y > img.height() - r.h) {
    throw OutOfBounds("crop rect (" + std::to_string(r.x) + ", " + std::to_string(r.y) + ", " +
                      std::to_string(r.w) + ", " + std::to_string(r.h) + ") exceeds " +
                      std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                      " image");
  }
  Image out(r.w, r.h);
  const auto src = img.samples();
  auto dst = out.samples();
  const auto row_bytes = static_cast<std::size_t>(r.w) * Image::kChannels;
  for (int j = 0; j < r.h; ++j) {
    const auto from = (static_cast<std::size_t>(r.y + j) * img.width() + r.x) * Image::kChannels;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_bytes,
                dst.begin() + static_cast<std::ptrdiff_t>(j * row_bytes));
  }
  return out;
}

inline Image hflip(const Image& img) {
  Image out(img.width(), img.height());
  const auto row = static_cast<std::size_t>(img.width()) * Image::kChannels;
  const std::uint8_t* src = img.samples().data();
  std::uint8_t* dst = out.samples().data();
  for (int y = 0; y < img.height(); ++y, src += row, dst += row) {
    for (std::size_t x = 0; x < row; x += Image::kChannels) {
      const std::uint8_t* from = src + row - Image::kChannels - x;
      dst[x] = from[0];
      dst[x + 1] = from[1];
      dst[x + 2] = from[2];
    }
  }
  return out;
}

namespace detail {

inline constexpr double kCatmullRomA = -0.5;

/// Keys cubic convolution kernel with a = -0.5.
inline double cubic_kernel(double t) noexcept {
  constexpr double a = kCatmullRomA;
  t = std::abs(t);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

/// Four source indices and weights per output coordinate along one axis.
struct AxisTaps {
  std::vector<int> index;
  std::vector<double> weight;
};

inline AxisTaps make_axis_taps(int in_size, int out_size) {
  AxisTaps taps;
  taps.index.resize(static_cast<std::size_t>(out_size) * 4);
  taps.weight.resize(static_cast<std::size_t>(out_size) * 4);
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  for (int d = 0; d < out_size; ++d) {
    const double src = (d + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    const double frac = src - base;
    const int ibase = static_cast<int>(base);
    for (int k = -1; k <= 2; ++k) {
      const auto slot = static_cast<std::size_t>(d) * 4 + static_cast<std::size_t>(k + 1);
      taps.index[slot] = std::clamp(ibase + k, 0, in_size - 1);
      taps.weight[slot] = cubic_kernel(frac - k);
    }
  }
  return taps;
}

}  // namespace detail

/// Separable bicubic resampling with the Catmull-Rom kernel.
///
/// Sample positions follow the half-pixel-center convention and edges are
/// handled by clamping source indices. No anti-aliasing prefilter is applied,
/// so downscaling uses the same four-tap kernel as upscaling. The horizontal
/// pass is kept in double precision; rounding happens once at the end.
inline Image resize_bicubic(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw InvalidArgument("resize target must be positive, got " + std::to_string(out_w) + "x" +
                          std::to_string(out_h));
  }
  const int in_w = img.width();
  const int in_h = img.height();
  const auto xt = detail::make_axis_taps(in_w, out_w);
  const auto yt = detail::make_axis_taps(in_h, out_h);
  constexpr int C = Image::kChannels;

  std::vector<double> rows(static_cast<std::size_t>(in_h) * out_w * C);
  const auto src = img.samples();
  for (int y = 0; y < in_h; ++y) {
    const std::uint8_t* in_row = src.data() + static_cast<std::size_t>(y) * in_w * C;
    double* out_row = rows.data() + static_cast<std::size_t>(y) * out_w * C;
    for (int x = 0; x < out_w; ++x) {
      const int* idx = xt.index.data() + static_cast<std::size_t>(x) * 4;
      const double* wt = xt.weight.data() + static_cast<std::size_t>(x) * 4;
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += wt[k] * in_row[idx[k] * C + c];
        out_row[x * C + c] = acc;
      }
    }
  }

  Image out(out_w, out_h);
  auto dst = out.samples();
  const auto stride = static_cast<std::size_t>(out_w) * C;
  for (int y = 0; y < out_h; ++y) {
    const int* idx = yt.index.data() + static_cast<std::size_t>(y) * 4;
    const double* wt = yt.weight.data() + static_cast<std::size_t>(y) * 4;
    const double* r0 = rows.data() + static_cast<std::size_t>(idx[0]) * stride;
    const double* r1 = rows.data() + static_cast<std::size_t>(idx[1]) * stride;
    const double* r2 = rows.data() + static_cast<std::size_t>(idx[2]) * stride;
    const double* r3 = rows.data() + static_cast<std::size_t>(idx[3]) * stride;
    std::uint8_t* out_row = dst.data() + static_cast<std::size_t>(y) * stride;
    for (std::size_t i = 0; i < stride; ++i) {
      out_row[i] = to_sample(wt[0] * r0[i] + wt[1] * r1[i] + wt[2] * r2[i] + wt[3] * r3[i]);
    }
  }
  return out;
}

/// Resize so the smaller side equals `target`, keeping the aspect ratio.
/// The long side is round-half-up(long * target / short).
inline Image scale_smallest_side(const Image& img, int target) {
  if (target < 1) throw InvalidArgument("target side must be positive");
  const long w = img.width();
  const long h = img.height();
  const long shortest = std::min(w, h);
  if (shortest == target) return img;
  const auto scaled_long = [&](long longer) {
    return static_cast<int>((2 * longer * target + shortest) / (2 * shortest));
  };
  if (w <= h) return resize_bicubic(img, target, scaled_long(h));
  return resize_bicubic(img, scaled_long(w), target);
}

}  // namespace ttakit
