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
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ttakit/augment.hpp"
#include "ttakit/error.hpp"
#include "ttakit/greedy.hpp"
#include "ttakit/image.hpp"
#include "ttakit/manifest.hpp"
#include "ttakit/metrics.hpp"
#include "ttakit/ppm.hpp"
#include "ttakit/predictor.hpp"
#include "ttakit/rng.hpp"
#include "ttakit/store.hpp"
#include "ttakit/views.hpp"

namespace ttakit {

/// Runs fn(0..n-1) on up to `workers` threads. Indices are handed out
/// dynamically; fn must write results by index. The first exception is
/// rethrown after all threads join.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

struct ImageFailure {
  std::string id;
  std::string reason;
  bool io = false;
};

/// Per-image failures collected over a whole run.
class PipelineError : public Error {
 public:
  explicit PipelineError(std::vector<ImageFailure> failures)
      : Error(summarize(failures)), failures_(std::move(failures)) {}

  const std::vector<ImageFailure>& failures() const noexcept { return failures_; }

  bool any_io() const noexcept {
    return std::any_of(failures_.begin(), failures_.end(), [](const auto& f) { return f.io; });
  }

 private:
  static std::string summarize(const std::vector<ImageFailure>& failures) {
    std::string s = std::to_string(failures.size()) + " image(s) failed:";
    for (const auto& f : failures) s += "\n  " + f.id + ": " + f.reason;
    return s;
  }

  std::vector<ImageFailure> failures_;
};

struct PipelineOptions {
  TransformSet set = TransformSet::Base;
  int workers = 1;
};

/// Renders every transform of every image and fills a store through the
/// predictor. `load(i)` returns image i at any size; it is normalized to a
/// short side of 256 first. Failures are collected and thrown together.
template <typename Loader>
PredictionStore predict_images(const std::vector<std::string>& ids, Loader&& load,
                               Predictor& predictor, const PipelineOptions& opts) {
  const std::size_t transforms = transform_count(opts.set);
  PredictionStore store(ids, transforms, predictor.class_count());
  std::vector<std::optional<ImageFailure>> failures(ids.size());
  std::mutex predictor_mutex;

  parallel_for(ids.size(), opts.workers, [&](std::size_t i) {
    try {
      const Image normalized = scale_smallest_side(load(i), kViewSide);
      const auto patches = render_all(normalized, opts.set);
      std::vector<PatchRequest> requests;
      requests.reserve(patches.size());
      for (std::size_t t = 0; t < patches.size(); ++t) {
        requests.push_back({ids[i], static_cast<int>(t), &patches[t]});
      }
      std::vector<ProbVector> rows;
      if (predictor.concurrent()) {
        rows = checked_predict(predictor, requests);
      } else {
        const std::lock_guard lock(predictor_mutex);
        rows = checked_predict(predictor, requests);
      }
      for (std::size_t t = 0; t < rows.size(); ++t) store.set_row(i, t, rows[t]);
    } catch (const IoError& e) {
      failures[i] = ImageFailure{ids[i], e.what(), true};
    } catch (const FormatError& e) {
      failures[i] = ImageFailure{ids[i], e.what(), true};
    } catch (const Error& e) {
      failures[i] = ImageFailure{ids[i], e.what(), false};
    }
  });

  std::vector<ImageFailure> collected;
  for (auto& f : failures) {
    if (f) collected.push_back(std::move(*f));
  }
  if (!collected.empty()) throw PipelineError(std::move(collected));
  return store;
}

inline PredictionStore run_pipeline(const std::vector<ManifestEntry>& manifest, Predictor& predictor,
                                    const PipelineOptions& opts) {
  std::vector<std::string> ids;
  ids.reserve(manifest.size());
  for (const auto& e : manifest) ids.push_back(e.id);
  return predict_images(ids, [&](std::size_t i) { return read_ppm_file(manifest[i].path); },
                        predictor, opts);
}

/// Template predictor from labelled 224x224 prototype images.
inline TemplatePredictor load_template_predictor(const std::vector<ManifestEntry>& prototypes,
                                                 TemplatePredictor::Options opts = {}) {
  std::vector<Image> examples;
  std::vector<int> labels;
  int classes = 0;
  for (const auto& e : prototypes) {
    if (e.label < 0) throw InvalidArgument("prototype '" + e.id + "' has no label");
    Image img = read_ppm_file(e.path);
    if (img.width() != kPatchSide || img.height() != kPatchSide) {
      img = render_patch(scale_smallest_side(img, kViewSide), TransformDescriptor{});
    }
    examples.push_back(std::move(img));
    labels.push_back(e.label);
    classes = std::max(classes, e.label + 1);
  }
  return TemplatePredictor::fit(examples, labels, static_cast<std::size_t>(classes), opts);
}

/// Lighting model from a random pixel subsample of the manifest's images.
///
/// The covariance is taken over raw 0..255 values and the eigenvalues are
/// then divided by 255, which makes P * (alpha * lambda) the pixel-unit
/// offset of the usual [0, 1]-scaled formulation. With sigma = 0.1 that
/// gives shifts of a few gray levels instead of hundreds.
inline LightingModel fit_lighting_model_from_images(const std::vector<ManifestEntry>& manifest,
                                                    std::uint64_t seed, std::size_t budget,
                                                    double sigma) {
  if (manifest.empty()) throw InvalidArgument("cannot fit a lighting model on an empty manifest");
  const std::size_t per_image = std::max<std::size_t>(1, budget / manifest.size());
  std::vector<Vec3> sample;
  sample.reserve(per_image * manifest.size());
  for (const auto& e : manifest) {
    const Image img = read_ppm_file(e.path);
    RngStream s = derive_stream(seed, "lighting:" + e.id);
    const std::size_t pixels = static_cast<std::size_t>(img.width()) * img.height();
    const auto px = img.samples();
    for (std::size_t k = 0; k < per_image; ++k) {
      const std::size_t p = std::min(static_cast<std::size_t>(s.next_uniform() * pixels), pixels - 1);
      sample.push_back({double(px[3 * p]), double(px[3 * p + 1]), double(px[3 * p + 2])});
    }
  }
  LightingModel model = fit_lighting_model(sample, sigma);
  for (auto& v : model.eigenvalues) v /= 255.0;
  return model;
}

// ---------------------------------------------------------------------------
// Ablation report

struct AblationRow {
  std::string name;
  std::size_t nominal_size = 0;  // the row's label size (greedy: the cap)
  std::vector<int> ids;          // subset actually evaluated
  double top1 = 0.0;
  double top5 = 0.0;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

/// Transform ids of the base set matching a filter, in id order.
template <typename Pred>
std::vector<int> select_transforms(TransformSet set, Pred&& keep) {
  std::vector<int> ids;
  for (const auto& d : enumerate_transforms(set)) {
    if (keep(d)) ids.push_back(d.id);
  }
  return ids;
}

/// Named fixed subsets of the base set: 10 (center view, native scale),
/// 30 (+3 scales), 30 (+3 views), all 90.
inline std::vector<NamedSubset> base_subsets() {
  using D = TransformDescriptor;
  return {
      {"10: 5 crops x 2 flips",
       select_transforms(TransformSet::Base,
                         [](const D& d) { return d.view == ViewKind::Center && d.scale == kViewSide; })},
      {"30: 5 crops x 2 flips x 3 scales",
       select_transforms(TransformSet::Base, [](const D& d) { return d.view == ViewKind::Center; })},
      {"30: 5 crops x 2 flips x 3 views",
       select_transforms(TransformSet::Base, [](const D& d) { return d.scale == kViewSide; })},
      {"90: 5 crops x 2 flips x 3 scales x 3 views",
       select_transforms(TransformSet::Base, [](const D&) { return true; })},
  };
}

/// Top-1 and top-5 errors for the fixed subsets and for greedy selections
/// capped at 10 and 15 transforms (chosen by `greedy_metric`). The top-5
/// column uses k = min(5, classes).
inline AblationReport ablation_report(const PredictionStore& store, const LabelMap& labels,
                                      Metric greedy_metric = Metric::top5()) {
  if (store.transform_count() != transform_count(TransformSet::Base)) {
    throw InvalidArgument("ablation needs a base-set store with " +
                          std::to_string(transform_count(TransformSet::Base)) + " transforms, got " +
                          std::to_string(store.transform_count()));
  }
  const int k5 = static_cast<int>(std::min<std::size_t>(5, store.class_count()));
  AblationReport report;
  const auto add = [&](std::string name, std::size_t nominal, std::vector<int> ids) {
    AblationRow row{std::move(name), nominal, std::move(ids), 0.0, 0.0};
    row.top1 = evaluate_subset(store, labels, Metric::top1(), row.ids);
    row.top5 = evaluate_subset(store, labels, Metric{k5}, row.ids);
    report.rows.push_back(std::move(row));
  };
  for (auto& s : base_subsets()) {
    const auto n = s.ids.size();
    add(std::move(s.name), n, std::move(s.ids));
  }
  for (const int cap : {10, 15}) {
    auto g = greedy_select(store, labels, greedy_metric, cap);
    add("greedy-" + std::to_string(cap), static_cast<std::size_t>(cap), std::move(g.selected));
  }
  return report;
}

inline void write_ablation_csv(std::ostream& out, const AblationReport& report) {
  out << "row,nominal_size,size,top1_error,top5_error\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.name) << ',' << r.nominal_size << ',' << r.ids.size() << ','
        << format_error(r.top1) << ',' << format_error(r.top5) << '\n';
  }
}

}  // namespace ttakit
