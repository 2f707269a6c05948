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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttakit/error.hpp"
#include "ttakit/image.hpp"
#include "ttakit/store.hpp"

namespace ttakit {

/// One rendered test-time patch handed to a predictor.
struct PatchRequest {
  std::string_view image_id;
  int transform_id = 0;
  const Image* patch = nullptr;
};

using ProbVector = std::vector<float>;

/// Maps patches to class-probability vectors.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::size_t class_count() const = 0;

  /// One vector per request, in request order.
  virtual std::vector<ProbVector> predict_batch(std::span<const PatchRequest> patches) = 0;

  /// Whether predict_batch may be called from several threads at once.
  virtual bool concurrent() const { return false; }
};

/// predict_batch plus the normalization contract: right length, entries in
/// [0, 1], sum within 1e-4 of one.
inline std::vector<ProbVector> checked_predict(Predictor& predictor,
                                               std::span<const PatchRequest> patches) {
  auto out = predictor.predict_batch(patches);
  if (out.size() != patches.size()) {
    throw NormalizationError("predictor returned " + std::to_string(out.size()) +
                             " vectors for " + std::to_string(patches.size()) + " patches");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::string where = "prediction for image '" + std::string(patches[i].image_id) +
                              "' transform " + std::to_string(patches[i].transform_id);
    if (out[i].size() != predictor.class_count()) {
      throw NormalizationError(where + ": expected " + std::to_string(predictor.class_count()) +
                               " classes, got " + std::to_string(out[i].size()));
    }
    check_probability_row(std::span<const float>(out[i]), where);
  }
  return out;
}

/// Replays rows of an existing store by (image id, transform id).
class StoreReplayPredictor final : public Predictor {
 public:
  explicit StoreReplayPredictor(PredictionStore store) : store_(std::move(store)) {
    for (std::size_t i = 0; i < store_.image_count(); ++i) index_.emplace(store_.image_ids()[i], i);
  }

  std::size_t class_count() const override { return store_.class_count(); }
  bool concurrent() const override { return true; }

  std::vector<ProbVector> predict_batch(std::span<const PatchRequest> patches) override {
    std::vector<ProbVector> out;
    out.reserve(patches.size());
    for (const auto& p : patches) {
      const auto it = index_.find(p.image_id);
      if (it == index_.end()) {
        throw InvalidArgument("replay store has no image '" + std::string(p.image_id) + "'");
      }
      const auto r = store_.row(it->second, static_cast<std::size_t>(p.transform_id));
      out.emplace_back(r.begin(), r.end());
    }
    return out;
  }

 private:
  PredictionStore store_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Block-averaged, mean-centered thumbnail of a patch: `grid` x `grid` cells
/// per channel. Patch sides must be divisible by `grid`.
inline std::vector<double> thumbnail_features(const Image& patch, int grid) {
  if (grid < 1 || patch.width() % grid != 0 || patch.height() % grid != 0) {
    throw InvalidArgument("patch size must be a multiple of the thumbnail grid");
  }
  const int bw = patch.width() / grid;
  const int bh = patch.height() / grid;
  const auto cells = static_cast<std::size_t>(grid);
  std::vector<double> f(cells * cells * 3, 0.0);
  std::vector<std::uint32_t> row_sums(cells * 3);
  const std::uint8_t* px = patch.samples().data();
  for (std::size_t gy = 0; gy < cells; ++gy) {
    std::fill(row_sums.begin(), row_sums.end(), 0u);
    for (int y = 0; y < bh; ++y) {
      for (std::size_t gx = 0; gx < cells; ++gx) {
        for (int x = 0; x < bw; ++x, px += 3) {
          row_sums[gx * 3] += px[0];
          row_sums[gx * 3 + 1] += px[1];
          row_sums[gx * 3 + 2] += px[2];
        }
      }
    }
    std::copy(row_sums.begin(), row_sums.end(), f.begin() + static_cast<std::ptrdiff_t>(gy * cells * 3));
  }
  double mean = 0.0;
  for (auto& v : f) {
    v /= static_cast<double>(bw * bh);
    mean += v;
  }
  mean /= static_cast<double>(f.size());
  for (auto& v : f) v -= mean;
  return f;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) noexcept {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

/// Softmax in double, returned as float. Max-shifted.
inline ProbVector softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> e(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += e[i] = std::exp(logits[i] - top);
  ProbVector out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = static_cast<float>(e[i] / sum);
  return out;
}

/// Toy classifier: cosine similarity of the patch thumbnail against one mean
/// template per class, softmax over similarity * sharpness.
class TemplatePredictor final : public Predictor {
 public:
  struct Options {
    int grid = 7;
    double sharpness = 20.0;
  };

  TemplatePredictor(std::vector<std::vector<double>> templates, Options opts)
      : templates_(std::move(templates)), opts_(opts) {
    if (templates_.size() < 2) throw InvalidArgument("template predictor needs two or more classes");
    for (const auto& t : templates_) {
      if (t.size() != templates_.front().size()) throw InvalidArgument("template sizes differ");
    }
  }

  /// Mean thumbnail per class over labelled example patches.
  static TemplatePredictor fit(std::span<const Image> examples, std::span<const int> labels,
                               std::size_t classes, Options opts) {
    if (examples.size() != labels.size()) throw InvalidArgument("one label per example required");
    std::vector<std::vector<double>> sums(classes);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
        throw InvalidArgument("template label out of range");
      }
      const auto f = thumbnail_features(examples[i], opts.grid);
      auto& s = sums[static_cast<std::size_t>(labels[i])];
      if (s.empty()) s.assign(f.size(), 0.0);
      for (std::size_t d = 0; d < f.size(); ++d) s[d] += f[d];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t k = 0; k < classes; ++k) {
      if (counts[k] == 0) throw InvalidArgument("no template example for class " + std::to_string(k));
      for (auto& v : sums[k]) v /= static_cast<double>(counts[k]);
    }
    return TemplatePredictor(std::move(sums), opts);
  }

  std::size_t class_count() const override { return templates_.size(); }
  bool concurrent() const override { return true; }
  const std::vector<std::vector<double>>& templates() const noexcept { return templates_; }

  ProbVector predict(const Image& patch) const {
    const auto f = thumbnail_features(patch, opts_.grid);
    if (f.size() != templates_.front().size()) throw InvalidArgument("patch/template size mismatch");
    std::vector<double> logits(templates_.size());
    for (std::size_t k = 0; k < templates_.size(); ++k) {
      logits[k] = opts_.sharpness * cosine_similarity(f, templates_[k]);
    }
    return softmax(logits);
  }

  std::vector<ProbVector> predict_batch(std::span<const PatchRequest> patches) override {
    std::vector<ProbVector> out;
    out.reserve(patches.size());
    for (const auto& p : patches) out.push_back(predict(*p.patch));
    return out;
  }

 private:
  std::vector<std::vector<double>> templates_;
  Options opts_;
};

}  // namespace ttakit
