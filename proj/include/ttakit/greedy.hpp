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

// Greedy forward selection of test-time transforms.
//
// Start from the best single transform, then repeatedly add the unselected
// transform whose inclusion gives the lowest error of the averaged
// prediction. Stop as soon as no candidate strictly lowers the error, when
// the subset reaches max_size, or when every transform is used. Ties go to
// the lowest transform id.

#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttakit/metrics.hpp"
#include "ttakit/store.hpp"

namespace ttakit {

enum class StopReason { NoImprovement, MaxSize, Exhausted };

inline std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::NoImprovement: return "no_improvement";
    case StopReason::MaxSize: return "max_size";
    case StopReason::Exhausted: return "exhausted";
  }
  return "?";
}

struct GreedyStep {
  int step = 0;  // 1-based
  int transform_id = 0;
  double error = 0.0;

  friend bool operator==(const GreedyStep&, const GreedyStep&) = default;
};

struct GreedyResult {
  std::vector<int> selected;
  std::vector<GreedyStep> trace;
  StopReason stop_reason = StopReason::NoImprovement;

  friend bool operator==(const GreedyResult&, const GreedyResult&) = default;
};

inline double evaluate_subset(const PredictionStore& store, const LabelMap& labels, Metric metric,
                              std::span<const int> subset) {
  return top_k_error(average_predictions(store, subset), store.image_ids(), labels, metric.k);
}

namespace detail {

/// Error of (running_sum + row t) / n, matching average_predictions bit for
/// bit when running_sum was accumulated in selection order.
inline double candidate_error(const PredictionStore& store, std::span<const std::size_t> truth,
                              std::span<const double> running_sum, std::size_t t, std::size_t n,
                              int k, std::vector<double>& scratch) {
  const std::size_t classes = store.class_count();
  scratch.resize(classes);
  std::size_t misses = 0;
  for (std::size_t i = 0; i < store.image_count(); ++i) {
    const auto r = store.row(i, t);
    const double* s = running_sum.data() + i * classes;
    for (std::size_t c = 0; c < classes; ++c) {
      scratch[c] = (s[c] + static_cast<double>(r[c])) / static_cast<double>(n);
    }
    if (!in_top_k(scratch, truth[i], k)) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(store.image_count());
}

}  // namespace detail

inline GreedyResult greedy_select(const PredictionStore& store, const LabelMap& labels,
                                  Metric metric, int max_size) {
  if (store.empty()) throw InvalidArgument("greedy selection needs a non-empty store");
  if (max_size < 1) throw InvalidArgument("max_size must be at least 1");
  check_metric(metric, store.class_count());
  const auto truth = resolve_labels(store.image_ids(), labels, store.class_count());
  const std::size_t classes = store.class_count();
  const std::size_t transforms = store.transform_count();

  GreedyResult result;
  std::vector<double> running(store.image_count() * classes, 0.0);
  std::vector<bool> used(transforms, false);
  std::vector<double> scratch;
  double current = std::numeric_limits<double>::infinity();

  for (;;) {
    if (result.selected.size() == static_cast<std::size_t>(max_size)) {
      result.stop_reason = StopReason::MaxSize;
      break;
    }
    if (result.selected.size() == transforms) {
      result.stop_reason = StopReason::Exhausted;
      break;
    }
    const std::size_t n = result.selected.size() + 1;
    std::size_t best = transforms;
    double best_error = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < transforms; ++t) {
      if (used[t]) continue;
      const double e = detail::candidate_error(store, truth, running, t, n, metric.k, scratch);
      if (e < best_error) {
        best_error = e;
        best = t;
      }
    }
    if (!(best_error < current)) {
      result.stop_reason = StopReason::NoImprovement;
      break;
    }
    used[best] = true;
    current = best_error;
    for (std::size_t i = 0; i < store.image_count(); ++i) {
      const auto r = store.row(i, best);
      for (std::size_t c = 0; c < classes; ++c) running[i * classes + c] += r[c];
    }
    result.selected.push_back(static_cast<int>(best));
    result.trace.push_back({static_cast<int>(n), static_cast<int>(best), best_error});
  }
  return result;
}

/// A fixed subset reported next to the greedy trace.
struct NamedSubset {
  std::string name;
  std::vector<int> ids;
};

struct CurveRow {
  std::string series;  // "greedy" or the baseline name
  int step = 0;  // 0 for baselines
  int transform_id = -1;  // -1 for baselines
  std::size_t size = 0;
  double error = 0.0;
};

/// Figure-style curve: one row per greedy step plus one per baseline.
inline std::vector<CurveRow> emit_curve(const GreedyResult& result, const PredictionStore& store,
                                        const LabelMap& labels, Metric metric,
                                        std::span<const NamedSubset> baselines) {
  std::vector<CurveRow> rows;
  for (const auto& s : result.trace) {
    rows.push_back({"greedy", s.step, s.transform_id, static_cast<std::size_t>(s.step), s.error});
  }
  for (const auto& b : baselines) {
    rows.push_back({b.name, 0, -1, b.ids.size(), evaluate_subset(store, labels, metric, b.ids)});
  }
  return rows;
}

/// Shortest decimal form that round-trips the double.
inline std::string format_error(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows) {
  out << "series,step,transform_id,size,error\n";
  for (const auto& r : rows) {
    out << csv_field(r.series) << ',';
    if (r.transform_id >= 0) out << r.step << ',' << r.transform_id;
    else out << ',';
    out << ',' << r.size << ',' << format_error(r.error) << '\n';
  }
}

inline void to_json(nlohmann::json& j, const GreedyResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& s : r.trace) {
    trace.push_back({{"step", s.step}, {"transform_id", s.transform_id}, {"error", s.error}});
  }
  j = nlohmann::json{{"selected", r.selected}, {"trace", trace}, {"stop_reason", to_string(r.stop_reason)}};
}

inline void from_json(const nlohmann::json& j, GreedyResult& r) {
  j.at("selected").get_to(r.selected);
  r.trace.clear();
  for (const auto& s : j.at("trace")) {
    r.trace.push_back({s.at("step").get<int>(), s.at("transform_id").get<int>(),
                       s.at("error").get<double>()});
  }
  const auto reason = j.at("stop_reason").get<std::string>();
  if (reason == "no_improvement") r.stop_reason = StopReason::NoImprovement;
  else if (reason == "max_size") r.stop_reason = StopReason::MaxSize;
  else if (reason == "exhausted") r.stop_reason = StopReason::Exhausted;
  else throw FormatError("unknown stop_reason '" + reason + "'");
}

}  // namespace ttakit
