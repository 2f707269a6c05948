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

// ttakit command line. Exit codes: 0 success, 1 validation error, 2 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "ttakit/ttakit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ttakit::IoError("cannot create " + path.string());
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ttakit::IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ttakit::FormatError(path.string() + ": " + e.what());
  }
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      ids.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ttakit::InvalidArgument("bad transform id '" + item + "'");
    }
  }
  return ids;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 0;
  std::size_t count = 100;
  int classes = 5;
  std::string out_dir;
};

void run_synth(const SynthArgs& a) {
  const auto ds = ttakit::synth_dataset(a.seed, a.count, a.classes, a.out_dir);
  std::cout << "wrote " << ds.images.size() << " images and " << ds.prototypes.size()
            << " prototypes to " << a.out_dir << '\n';
}

struct AugmentArgs {
  std::string manifest;
  std::uint64_t seed = 0;
  int count_per_image = 1;
  std::string out_dir;
  std::string lighting_model;
  double sigma = 0.1;
  std::size_t lighting_budget = 1'000'000;
  int workers = 1;
  bool native = false;  // highres-augment only
};

ttakit::LightingModel resolve_lighting(const AugmentArgs& a,
                                       const std::vector<ttakit::ManifestEntry>& manifest) {
  if (!a.lighting_model.empty()) return read_json_file(a.lighting_model).get<ttakit::LightingModel>();
  auto model = ttakit::fit_lighting_model_from_images(manifest, a.seed, a.lighting_budget, a.sigma);
  write_json_file(fs::path(a.out_dir) / "lighting_model.json", json(model));
  return model;
}

enum class AugmentMode { Base, HighResSimulated, HighResNative };

void run_augment(const AugmentArgs& a, AugmentMode mode) {
  if (a.count_per_image < 1) throw ttakit::InvalidArgument("--count-per-image must be >= 1");
  const auto manifest = ttakit::read_manifest(a.manifest);
  fs::create_directories(a.out_dir);
  const auto model = resolve_lighting(a, manifest);

  std::vector<std::string> sidecar(manifest.size());
  std::vector<std::optional<ttakit::ImageFailure>> failures(manifest.size());
  ttakit::parallel_for(manifest.size(), a.workers, [&](std::size_t i) {
    const auto& e = manifest[i];
    try {
      const ttakit::Image img = ttakit::read_ppm_file(e.path);
      ttakit::RngStream s = ttakit::derive_stream(a.seed, e.id);
      std::string lines;
      for (int k = 0; k < a.count_per_image; ++k) {
        std::pair<ttakit::Image, ttakit::AugmentRecord> sample;
        switch (mode) {
          case AugmentMode::Base: sample = ttakit::sample_train_patch(img, s); break;
          case AugmentMode::HighResSimulated: sample = ttakit::simulate_highres_patch(img, s); break;
          case AugmentMode::HighResNative: sample = ttakit::sample_native_highres_patch(img, s); break;
        }
        auto [patch, rec] = std::move(sample);
        auto [jittered, draw] = ttakit::apply_color_jitter(patch, s, model);
        rec.jitter = draw;
        const std::string file = e.id + "_" + std::to_string(k) + ".ppm";
        ttakit::write_ppm_file(fs::path(a.out_dir) / file, jittered);
        json line = rec;
        line["image_id"] = e.id;
        line["index"] = k;
        line["file"] = file;
        lines += line.dump() + '\n';
      }
      sidecar[i] = std::move(lines);
    } catch (const ttakit::IoError& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), true};
    } catch (const ttakit::FormatError& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), true};
    } catch (const ttakit::Error& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), false};
    }
  });
  std::vector<ttakit::ImageFailure> collected;
  for (auto& f : failures) {
    if (f) collected.push_back(std::move(*f));
  }
  if (!collected.empty()) throw ttakit::PipelineError(std::move(collected));

  const char* name = mode == AugmentMode::Base ? "augment.jsonl" : "highres_augment.jsonl";
  auto out = open_out(fs::path(a.out_dir) / name);
  for (const auto& s : sidecar) out << s;
}

struct ViewsArgs {
  std::string manifest;
  std::string set = "base";
  std::string out_dir;
  std::string emit_descriptors;
  int workers = 1;
};

void run_views(const ViewsArgs& a) {
  const auto set = ttakit::transform_set_from_string(a.set);
  if (!a.emit_descriptors.empty()) {
    auto out = open_out(a.emit_descriptors);
    for (const auto& d : ttakit::enumerate_transforms(set)) out << json(d).dump() << '\n';
  }
  if (a.manifest.empty()) return;
  if (a.out_dir.empty()) throw ttakit::InvalidArgument("--out-dir is required with --manifest");
  const auto manifest = ttakit::read_manifest(a.manifest);
  fs::create_directories(a.out_dir);
  std::vector<std::optional<ttakit::ImageFailure>> failures(manifest.size());
  ttakit::parallel_for(manifest.size(), a.workers, [&](std::size_t i) {
    const auto& e = manifest[i];
    try {
      const auto img = ttakit::scale_smallest_side(ttakit::read_ppm_file(e.path), ttakit::kViewSide);
      const auto patches = ttakit::render_all(img, set);
      for (std::size_t t = 0; t < patches.size(); ++t) {
        ttakit::write_ppm_file(fs::path(a.out_dir) / (e.id + "_" + std::to_string(t) + ".ppm"),
                               patches[t]);
      }
    } catch (const ttakit::IoError& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), true};
    } catch (const ttakit::FormatError& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), true};
    } catch (const ttakit::Error& ex) {
      failures[i] = ttakit::ImageFailure{e.id, ex.what(), false};
    }
  });
  std::vector<ttakit::ImageFailure> collected;
  for (auto& f : failures) {
    if (f) collected.push_back(std::move(*f));
  }
  if (!collected.empty()) throw ttakit::PipelineError(std::move(collected));
}

struct PredictArgs {
  std::string manifest;
  std::string set = "base";
  std::string predictor = "toy";
  std::string templates;
  int grid = 7;
  double sharpness = 20.0;
  std::string command;
  std::size_t classes = 0;
  std::string work_dir;
  std::string replay_store;
  std::string out;
  int workers = 1;
};

void run_predict(const PredictArgs& a) {
  const auto manifest = ttakit::read_manifest(a.manifest);
  const ttakit::PipelineOptions opts{ttakit::transform_set_from_string(a.set), a.workers};
  std::unique_ptr<ttakit::Predictor> predictor;
  if (a.predictor == "toy") {
    if (a.templates.empty()) throw ttakit::InvalidArgument("--templates is required for the toy predictor");
    predictor = std::make_unique<ttakit::TemplatePredictor>(ttakit::load_template_predictor(
        ttakit::read_manifest(a.templates), {a.grid, a.sharpness}));
  } else if (a.predictor == "external") {
    if (a.command.empty() || a.classes == 0) {
      throw ttakit::InvalidArgument("--command and --classes are required for the external predictor");
    }
    const fs::path work = a.work_dir.empty() ? fs::path(a.out).parent_path() / "predict_work" : fs::path(a.work_dir);
    predictor = std::make_unique<ttakit::ExternalProcessPredictor>(a.command, a.classes, work);
  } else if (a.predictor == "replay") {
    if (a.replay_store.empty()) throw ttakit::InvalidArgument("--replay-store is required for replay");
    predictor = std::make_unique<ttakit::StoreReplayPredictor>(ttakit::read_store_file(a.replay_store));
  } else {
    throw ttakit::InvalidArgument("unknown predictor '" + a.predictor + "' (toy|external|replay)");
  }
  const auto store = ttakit::run_pipeline(manifest, *predictor, opts);
  if (auto* ext = dynamic_cast<ttakit::ExternalProcessPredictor*>(predictor.get())) {
    if (const int status = ext->shutdown(); status != 0) {
      throw ttakit::InvalidArgument("external predictor exited with status " + std::to_string(status));
    }
  }
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
  ttakit::write_store_file(a.out, store);
}

struct SelectArgs {
  std::string store;
  std::string labels;
  std::string metric = "top5";
  int max_size = 0;
  std::string curve_out;
  std::string out;
  double holdout_fraction = 0.0;
};

/// Rows [begin, end) of a store as a new store.
ttakit::PredictionStore slice_images(const ttakit::PredictionStore& s, std::size_t begin, std::size_t end) {
  std::vector<std::string> ids(s.image_ids().begin() + static_cast<std::ptrdiff_t>(begin),
                               s.image_ids().begin() + static_cast<std::ptrdiff_t>(end));
  const std::size_t stride = s.transform_count() * s.class_count();
  std::vector<float> probs(s.probs().begin() + static_cast<std::ptrdiff_t>(begin * stride),
                           s.probs().begin() + static_cast<std::ptrdiff_t>(end * stride));
  return ttakit::PredictionStore(std::move(ids), s.transform_count(), s.class_count(), std::move(probs));
}

std::vector<ttakit::NamedSubset> curve_baselines(const ttakit::PredictionStore& store) {
  std::vector<ttakit::NamedSubset> out;
  if (store.transform_count() == ttakit::transform_count(ttakit::TransformSet::Base)) {
    auto fixed = ttakit::base_subsets();
    out.push_back(std::move(fixed.front()));
    out.push_back(std::move(fixed.back()));
  } else {
    ttakit::NamedSubset all{"all", {}};
    for (std::size_t t = 0; t < store.transform_count(); ++t) all.ids.push_back(static_cast<int>(t));
    out.push_back(std::move(all));
  }
  return out;
}

void write_curve(const fs::path& path, const ttakit::GreedyResult& result, const ttakit::PredictionStore& store,
                 const ttakit::LabelMap& labels, ttakit::Metric metric) {
  const auto baselines = curve_baselines(store);
  const auto rows = ttakit::emit_curve(result, store, labels, metric, baselines);
  auto out = open_out(path);
  ttakit::write_curve_csv(out, rows);
}

void run_select(const SelectArgs& a) {
  const auto store = ttakit::read_store_file(a.store);
  const auto labels = ttakit::read_labels(a.labels);
  const auto metric = ttakit::metric_from_string(a.metric);
  if (!(a.holdout_fraction >= 0.0 && a.holdout_fraction < 1.0)) {
    throw ttakit::InvalidArgument("--holdout-fraction must be in [0, 1)");
  }
  const int max_size = a.max_size > 0 ? a.max_size : static_cast<int>(store.transform_count());
  const auto held = static_cast<std::size_t>(a.holdout_fraction * static_cast<double>(store.image_count()) + 0.5);
  const std::size_t fit_end = store.image_count() - held;
  const auto fit_store = held == 0 ? store : slice_images(store, 0, fit_end);

  const auto result = ttakit::greedy_select(fit_store, labels, metric, max_size);
  json j = result;
  j["metric"] = metric.name();
  if (held > 0) {
    const auto holdout = slice_images(store, fit_end, store.image_count());
    j["holdout"] = {{"images", held},
                    {"error", ttakit::evaluate_subset(holdout, labels, metric, result.selected)}};
  }
  if (!a.out.empty()) write_json_file(a.out, j);
  if (!a.curve_out.empty()) write_curve(a.curve_out, result, fit_store, labels, metric);
  std::cout << "selected " << result.selected.size() << " transforms (" << ttakit::to_string(result.stop_reason)
            << "), " << metric.name() << " error "
            << (result.trace.empty() ? 1.0 : result.trace.back().error) << '\n';
}

struct EvaluateArgs {
  std::string store;
  std::string labels;
  std::string selection;
  std::string subset;
  std::string out;
};

void run_evaluate(const EvaluateArgs& a) {
  const auto store = ttakit::read_store_file(a.store);
  const auto labels = ttakit::read_labels(a.labels);
  const int k5 = static_cast<int>(std::min<std::size_t>(5, store.class_count()));
  std::vector<ttakit::NamedSubset> rows;
  rows.push_back({"center-crop", {0}});
  ttakit::NamedSubset all{"all", {}};
  for (std::size_t t = 0; t < store.transform_count(); ++t) all.ids.push_back(static_cast<int>(t));
  rows.push_back(std::move(all));
  if (!a.selection.empty()) {
    rows.push_back({"selection", read_json_file(a.selection).at("selected").get<std::vector<int>>()});
  }
  if (!a.subset.empty()) rows.push_back({"subset", parse_id_list(a.subset)});

  std::ostringstream csv;
  csv << "subset,size,top1_error,top5_error\n";
  for (const auto& r : rows) {
    csv << ttakit::csv_field(r.name) << ',' << r.ids.size() << ','
        << ttakit::format_error(ttakit::evaluate_subset(store, labels, ttakit::Metric::top1(), r.ids)) << ','
        << ttakit::format_error(ttakit::evaluate_subset(store, labels, ttakit::Metric{k5}, r.ids)) << '\n';
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    auto out = open_out(a.out);
    out << csv.str();
  }
}

struct AblationArgs {
  std::string store;
  std::string labels;
  std::string metric = "top5";
  std::string out;
};

void run_ablation(const AblationArgs& a) {
  const auto store = ttakit::read_store_file(a.store);
  const auto report =
      ttakit::ablation_report(store, ttakit::read_labels(a.labels), ttakit::metric_from_string(a.metric));
  if (a.out.empty()) {
    ttakit::write_ablation_csv(std::cout, report);
  } else {
    auto out = open_out(a.out);
    ttakit::write_ablation_csv(out, report);
  }
}

struct CurveArgs {
  std::string store;
  std::string labels;
  std::string selection;
  std::string metric = "top5";
  std::string out;
};

void run_curve(const CurveArgs& a) {
  const auto store = ttakit::read_store_file(a.store);
  const auto labels = ttakit::read_labels(a.labels);
  const auto metric = ttakit::metric_from_string(a.metric);
  const auto result = read_json_file(a.selection).get<ttakit::GreedyResult>();
  write_curve(a.out, result, store, labels, metric);
}

void run_schedule(const std::string& out) {
  const json j = ttakit::default_highres_schedule();
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttakit: training and test-time augmentation toolkit"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags override its keys");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic sprite dataset");
  synth_cmd->add_option("--seed", synth.seed, "Global seed");
  synth_cmd->add_option("--count", synth.count, "Number of images");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes")->check(CLI::Range(2, 1000));
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  AugmentArgs augment;
  const auto add_augment_flags = [](CLI::App* cmd, AugmentArgs& a) {
    cmd->add_option("--manifest", a.manifest, "Image manifest (JSON lines)")->required();
    cmd->add_option("--seed", a.seed, "Global seed");
    cmd->add_option("--count-per-image", a.count_per_image, "Patches per image");
    cmd->add_option("--out-dir", a.out_dir, "Output directory")->required();
    cmd->add_option("--lighting-model", a.lighting_model, "Lighting model JSON (fitted from the manifest if absent)");
    cmd->add_option("--sigma", a.sigma, "Lighting alpha std-dev when fitting");
    cmd->add_option("--lighting-budget", a.lighting_budget, "Pixels sampled when fitting the lighting model");
    cmd->add_option("--workers", a.workers, "Worker threads");
  };
  auto* augment_cmd = app.add_subcommand("augment", "Sample augmented training patches");
  add_augment_flags(augment_cmd, augment);

  AugmentArgs highres;
  auto* highres_cmd = app.add_subcommand("highres-augment", "Sample high-resolution training patches");
  add_augment_flags(highres_cmd, highres);
  highres_cmd->add_flag("--native", highres.native, "Images are stored at 448 short side; crop 224 directly");

  ViewsArgs views;
  auto* views_cmd = app.add_subcommand("views", "Render test-time patches");
  views_cmd->add_option("--manifest", views.manifest, "Image manifest (JSON lines)");
  views_cmd->add_option("--set", views.set, "Transform set: base|highres");
  views_cmd->add_option("--out-dir", views.out_dir, "Directory for <image_id>_<transform_id>.ppm");
  views_cmd->add_option("--emit-descriptors", views.emit_descriptors, "Write the descriptor table (JSON lines)");
  views_cmd->add_option("--workers", views.workers, "Worker threads");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Fill a prediction store");
  predict_cmd->add_option("--manifest", predict.manifest, "Image manifest (JSON lines)")->required();
  predict_cmd->add_option("--set", predict.set, "Transform set: base|highres");
  predict_cmd->add_option("--predictor", predict.predictor, "toy|external|replay");
  predict_cmd->add_option("--templates", predict.templates, "Prototype manifest for the toy predictor");
  predict_cmd->add_option("--grid", predict.grid, "Toy predictor thumbnail grid");
  predict_cmd->add_option("--sharpness", predict.sharpness, "Toy predictor softmax sharpness");
  predict_cmd->add_option("--command", predict.command, "External predictor command line");
  predict_cmd->add_option("--classes", predict.classes, "Class count of the external predictor");
  predict_cmd->add_option("--work-dir", predict.work_dir, "Scratch directory for external-predictor patches");
  predict_cmd->add_option("--replay-store", predict.replay_store, "Store replayed by the replay predictor");
  predict_cmd->add_option("--out", predict.out, "Output store file")->required();
  predict_cmd->add_option("--workers", predict.workers, "Worker threads");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "Greedy transform selection");
  select_cmd->add_option("--store", select.store, "Prediction store")->required();
  select_cmd->add_option("--labels", select.labels, "Labels (manifest JSON lines)")->required();
  select_cmd->add_option("--metric", select.metric, "top1|top5");
  select_cmd->add_option("--max-size", select.max_size, "Largest subset (0 = no cap)");
  select_cmd->add_option("--curve-out", select.curve_out, "Curve CSV");
  select_cmd->add_option("--out", select.out, "Selection JSON");
  select_cmd->add_option("--holdout-fraction", select.holdout_fraction,
                         "Trailing fraction of images excluded from selection and scored separately");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Top-1/top-5 errors of transform subsets");
  evaluate_cmd->add_option("--store", evaluate.store, "Prediction store")->required();
  evaluate_cmd->add_option("--labels", evaluate.labels, "Labels (manifest JSON lines)")->required();
  evaluate_cmd->add_option("--selection", evaluate.selection, "Selection JSON from `select`");
  evaluate_cmd->add_option("--subset", evaluate.subset, "Comma-separated transform ids");
  evaluate_cmd->add_option("--out", evaluate.out, "Report CSV (stdout if absent)");

  AblationArgs ablation;
  auto* ablation_cmd = app.add_subcommand("ablation", "Fixed-subset and greedy ablation table");
  ablation_cmd->add_option("--store", ablation.store, "Base-set prediction store")->required();
  ablation_cmd->add_option("--labels", ablation.labels, "Labels (manifest JSON lines)")->required();
  ablation_cmd->add_option("--metric", ablation.metric, "Metric the greedy rows optimize");
  ablation_cmd->add_option("--out", ablation.out, "Report CSV (stdout if absent)");

  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "Greedy curve CSV from a saved selection");
  curve_cmd->add_option("--store", curve.store, "Prediction store")->required();
  curve_cmd->add_option("--labels", curve.labels, "Labels (manifest JSON lines)")->required();
  curve_cmd->add_option("--selection", curve.selection, "Selection JSON from `select`")->required();
  curve_cmd->add_option("--metric", curve.metric, "top1|top5");
  curve_cmd->add_option("--out", curve.out, "Curve CSV")->required();

  std::string schedule_out;
  auto* schedule_cmd = app.add_subcommand("schedule", "Write the high-resolution fine-tuning schedule");
  schedule_cmd->add_option("--out", schedule_out, "Schedule JSON (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*synth_cmd) run_synth(synth);
    else if (*augment_cmd) run_augment(augment, AugmentMode::Base);
    else if (*highres_cmd)
      run_augment(highres, highres.native ? AugmentMode::HighResNative : AugmentMode::HighResSimulated);
    else if (*views_cmd) run_views(views);
    else if (*predict_cmd) run_predict(predict);
    else if (*select_cmd) run_select(select);
    else if (*evaluate_cmd) run_evaluate(evaluate);
    else if (*ablation_cmd) run_ablation(ablation);
    else if (*curve_cmd) run_curve(curve);
    else if (*schedule_cmd) run_schedule(schedule_out);
  } catch (const ttakit::PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.any_io() ? kExitIo : kExitValidation;
  } catch (const ttakit::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ttakit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
