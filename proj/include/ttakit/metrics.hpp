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
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttakit/error.hpp"
#include "ttakit/store.hpp"

namespace ttakit {

using LabelMap = std::map<std::string, int, std::less<>>;

/// Top-k error. k = 1 and k = 5 are the usual reporting points.
struct Metric {
  int k = 5;

  static constexpr Metric top1() noexcept { return {1}; }
  static constexpr Metric top5() noexcept { return {5}; }

  std::string name() const { return "top" + std::to_string(k); }

  friend bool operator==(const Metric&, const Metric&) = default;
};

inline Metric metric_from_string(std::string_view s) {
  if (s.size() > 3 && s.substr(0, 3) == "top") {
    int k = 0;
    for (const char ch : s.substr(3)) {
      if (ch < '0' || ch > '9') throw InvalidArgument("bad metric '" + std::string(s) + "'");
      k = k * 10 + (ch - '0');
    }
    if (k >= 1) return Metric{k};
  }
  throw InvalidArgument("bad metric '" + std::string(s) + "' (expected top1, top5, ...)");
}

/// Row-per-image probability matrix in double precision.
struct ProbMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
};

/// True when `label` ranks within the k highest entries of `probs`. Ties rank
/// the lower class index first.
inline bool in_top_k(std::span<const double> probs, std::size_t label, int k) noexcept {
  const double p = probs[label];
  std::size_t ahead = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (probs[c] > p || (probs[c] == p && c < label)) ++ahead;
  }
  return ahead < static_cast<std::size_t>(k);
}

/// Resolves each image's label, checking it exists and is in range.
inline std::vector<std::size_t> resolve_labels(std::span<const std::string> image_ids,
                                               const LabelMap& labels, std::size_t class_count) {
  std::vector<std::size_t> out;
  out.reserve(image_ids.size());
  for (const auto& id : image_ids) {
    const auto it = labels.find(id);
    if (it == labels.end()) throw InvalidArgument("no label for image '" + id + "'");
    if (it->second < 0 || static_cast<std::size_t>(it->second) >= class_count) {
      throw InvalidArgument("label " + std::to_string(it->second) + " of image '" + id +
                            "' outside [0, " + std::to_string(class_count) + ")");
    }
    out.push_back(static_cast<std::size_t>(it->second));
  }
  return out;
}

inline void check_metric(Metric metric, std::size_t class_count) {
  if (metric.k < 1 || static_cast<std::size_t>(metric.k) > class_count) {
    throw InvalidArgument("top-" + std::to_string(metric.k) + " needs k in [1, " +
                          std::to_string(class_count) + "]");
  }
}

inline void check_subset(const PredictionStore& store, std::span<const int> subset) {
  if (subset.empty()) throw InvalidArgument("transform subset is empty");
  std::vector<bool> seen(store.transform_count(), false);
  for (const int t : subset) {
    if (t < 0 || static_cast<std::size_t>(t) >= store.transform_count()) {
      throw InvalidArgument("transform id " + std::to_string(t) + " out of range");
    }
    if (seen[static_cast<std::size_t>(t)]) {
      throw InvalidArgument("transform id " + std::to_string(t) + " repeated in subset");
    }
    seen[static_cast<std::size_t>(t)] = true;
  }
}

/// Arithmetic mean of the subset's rows per image, summed in subset order.
inline ProbMatrix average_predictions(const PredictionStore& store, std::span<const int> subset) {
  check_subset(store, subset);
  ProbMatrix out{store.image_count(), store.class_count(), {}};
  out.values.assign(out.rows * out.cols, 0.0);
  const double n = static_cast<double>(subset.size());
  for (std::size_t i = 0; i < out.rows; ++i) {
    auto acc = out.row(i);
    for (const int t : subset) {
      const auto r = store.row(i, static_cast<std::size_t>(t));
      for (std::size_t c = 0; c < out.cols; ++c) acc[c] += r[c];
    }
    for (auto& v : acc) v /= n;
  }
  return out;
}

/// Fraction of images whose label is not among the k most probable classes.
inline double top_k_error(const ProbMatrix& preds, std::span<const std::string> image_ids,
                          const LabelMap& labels, int k) {
  if (image_ids.size() != preds.rows) throw InvalidArgument("image id count does not match rows");
  check_metric(Metric{k}, preds.cols);
  if (preds.rows == 0) return 0.0;
  const auto truth = resolve_labels(image_ids, labels, preds.cols);
  std::size_t misses = 0;
  for (std::size_t i = 0; i < preds.rows; ++i) {
    if (!in_top_k(preds.row(i), truth[i], k)) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(preds.rows);
}

}  // namespace ttakit
