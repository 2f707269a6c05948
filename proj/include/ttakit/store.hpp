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

// Dense image x transform x class probability tensor and its binary file.
//
// File layout, all integers and floats little-endian:
//   "TTAP"                       4 bytes magic
//   u16 version                  = 1
//   u32 image_count
//   u32 transform_count
//   u32 class_count
//   image_count x { u16 byte length, UTF-8 bytes }   image ids, in order
//   image_count * transform_count * class_count f32  image-major, class-minor

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ttakit/error.hpp"

namespace ttakit {

inline constexpr double kRowSumTolerance = 1e-4;

/// Throws NormalizationError unless `row` is a probability vector.
template <typename T>
void check_probability_row(std::span<const T> row, const std::string& where) {
  double sum = 0.0;
  for (const T p : row) {
    if (!(p >= 0 && p <= 1)) {
      throw NormalizationError(where + ": entry " + std::to_string(p) + " outside [0, 1]");
    }
    sum += static_cast<double>(p);
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw NormalizationError(where + ": probabilities sum to " + std::to_string(sum));
  }
}

class PredictionStore {
 public:
  PredictionStore() = default;

  /// Uniform rows; fill with set_row.
  PredictionStore(std::vector<std::string> image_ids, std::size_t transform_count,
                  std::size_t class_count)
      : image_ids_(std::move(image_ids)), transforms_(transform_count), classes_(class_count) {
    if (transforms_ == 0 || classes_ == 0) {
      throw InvalidArgument("store needs at least one transform and one class");
    }
    probs_.assign(image_ids_.size() * transforms_ * classes_,
                  1.0f / static_cast<float>(classes_));
  }

  PredictionStore(std::vector<std::string> image_ids, std::size_t transform_count,
                  std::size_t class_count, std::vector<float> probs)
      : image_ids_(std::move(image_ids)),
        transforms_(transform_count),
        classes_(class_count),
        probs_(std::move(probs)) {
    if (transforms_ == 0 || classes_ == 0) {
      throw InvalidArgument("store needs at least one transform and one class");
    }
    if (probs_.size() != image_ids_.size() * transforms_ * classes_) {
      throw InvalidArgument("probability buffer size does not match store dimensions");
    }
    validate();
  }

  std::size_t image_count() const noexcept { return image_ids_.size(); }
  std::size_t transform_count() const noexcept { return transforms_; }
  std::size_t class_count() const noexcept { return classes_; }
  const std::vector<std::string>& image_ids() const noexcept { return image_ids_; }
  std::span<const float> probs() const noexcept { return probs_; }
  bool empty() const noexcept { return image_ids_.empty(); }

  std::span<const float> row(std::size_t image, std::size_t transform) const {
    check_index(image, transform);
    return {probs_.data() + offset(image, transform), classes_};
  }

  void set_row(std::size_t image, std::size_t transform, std::span<const float> values) {
    check_index(image, transform);
    if (values.size() != classes_) {
      throw InvalidArgument("row has " + std::to_string(values.size()) + " classes, store has " +
                            std::to_string(classes_));
    }
    check_probability_row(values, where(image, transform));
    std::copy(values.begin(), values.end(), probs_.begin() + static_cast<std::ptrdiff_t>(offset(image, transform)));
  }

  void validate() const {
    for (std::size_t i = 0; i < image_count(); ++i) {
      for (std::size_t t = 0; t < transforms_; ++t) {
        check_probability_row(row(i, t), where(i, t));
      }
    }
  }

  friend bool operator==(const PredictionStore&, const PredictionStore&) = default;

 private:
  std::size_t offset(std::size_t image, std::size_t transform) const noexcept {
    return (image * transforms_ + transform) * classes_;
  }

  void check_index(std::size_t image, std::size_t transform) const {
    if (image >= image_count() || transform >= transforms_) {
      throw OutOfBounds("store index (" + std::to_string(image) + ", " + std::to_string(transform) +
                        ") out of range");
    }
  }

  std::string where(std::size_t image, std::size_t transform) const {
    return "image '" + image_ids_[image] + "' transform " + std::to_string(transform);
  }

  std::vector<std::string> image_ids_;
  std::size_t transforms_ = 0;
  std::size_t classes_ = 0;
  std::vector<float> probs_;
};

namespace detail {

inline constexpr char kStoreMagic[4] = {'T', 'T', 'A', 'P'};
inline constexpr std::uint16_t kStoreVersion = 1;

template <typename U>
void put_le(std::ostream& out, U value) {
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  }
  out.write(bytes, sizeof(U));
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw FormatError(std::string("store truncated while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<U>(bytes[i]) << (8 * i));
  return value;
}

}  // namespace detail

inline void write_store(std::ostream& out, const PredictionStore& store) {
  const auto fits_u32 = [](std::size_t n) { return n <= std::numeric_limits<std::uint32_t>::max(); };
  if (!fits_u32(store.image_count()) || !fits_u32(store.transform_count()) ||
      !fits_u32(store.class_count())) {
    throw InvalidArgument("store dimensions exceed the u32 header fields");
  }
  out.write(detail::kStoreMagic, 4);
  detail::put_le<std::uint16_t>(out, detail::kStoreVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.image_count()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.transform_count()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.class_count()));
  for (const auto& id : store.image_ids()) {
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("image id longer than 65535 bytes");
    }
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (const float p : store.probs()) detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(p));
}

inline PredictionStore read_store(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, detail::kStoreMagic, 4) != 0) {
    throw FormatError("not a prediction store (bad magic)");
  }
  const auto version = detail::get_le<std::uint16_t>(in, "version");
  if (version != detail::kStoreVersion) {
    throw FormatError("unsupported store version " + std::to_string(version));
  }
  const std::size_t images = detail::get_le<std::uint32_t>(in, "image count");
  const std::size_t transforms = detail::get_le<std::uint32_t>(in, "transform count");
  const std::size_t classes = detail::get_le<std::uint32_t>(in, "class count");
  std::vector<std::string> ids;
  ids.reserve(images);
  for (std::size_t i = 0; i < images; ++i) {
    const auto len = detail::get_le<std::uint16_t>(in, "id length");
    std::string id(len, '\0');
    if (!in.read(id.data(), len)) throw FormatError("store truncated in image id table");
    ids.push_back(std::move(id));
  }
  std::vector<float> probs(images * transforms * classes);
  for (auto& p : probs) p = std::bit_cast<float>(detail::get_le<std::uint32_t>(in, "probabilities"));
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after store");
  return PredictionStore(std::move(ids), transforms, classes, std::move(probs));
}

inline void write_store_file(const std::filesystem::path& path, const PredictionStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  write_store(out, store);
  if (!out) throw IoError("write failed for " + path.string());
}

inline PredictionStore read_store_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_store(in);
}

}  // namespace ttakit
