// Copyright 2026 The anosynth Authors. All Rights Reserved.
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


#include "anosynth/pipeline/evaluate.hpp"

#include <fstream>
#include <map>

#include "anosynth/core/error.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::pipeline {
namespace fs = std::filesystem;

namespace {

template <typename T>
std::shared_ptr<T> load_kind(const backends::BackendConfigs& configs, backends::BackendKind kind) {
  const auto it = configs.find(kind);
  require(it != configs.end(), ErrorCode::InvalidArgument, "no " + backends::to_string(kind) + " backend configured");
  auto b = std::dynamic_pointer_cast<T>(backends::load_backend(it->second));
  require(b != nullptr, ErrorCode::BackendLoad, "backend for " + backends::to_string(kind) + " has the wrong type");
  return b;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& v) {
  double s = 0.0;
  int n = 0;
  for (const auto& x : v) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  return n > 0 ? std::optional<double>(s / n) : std::nullopt;
}

}  // namespace

std::vector<GeneratedItem> scan_generated(const fs::path& gen_dir) {
  require(fs::is_directory(gen_dir), ErrorCode::Io, "generated directory " + gen_dir.string() + " does not exist");
  std::vector<fs::path> manifests;
  for (const auto& e : fs::recursive_directory_iterator(gen_dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.ends_with(".manifest.json")) manifests.push_back(e.path());
  }
  std::sort(manifests.begin(), manifests.end());
  std::vector<GeneratedItem> items;
  for (const auto& p : manifests) {
    std::ifstream in(p);
    const auto m = nlohmann::json::parse(in, nullptr, false);
    require(!m.is_discarded() && m.value("schema", std::string()) == kManifestSchema, ErrorCode::InvalidArgument,
            "not a generation manifest: " + p.string());
    GeneratedItem item;
    item.category = m.at("job").at("category").get<std::string>();
    item.defect = m.at("job").at("defect").get<std::string>();
    item.image = gen_dir / m.at("outputs").at("image").at("file").get<std::string>();
    item.mask = gen_dir / m.at("outputs").at("mask").at("file").get<std::string>();
    item.manifest = p;
    items.push_back(std::move(item));
  }
  return items;
}

eval::MetricsReport evaluate_generated(const EvaluateOptions& options, const LogFn& log) {
  for (const auto& m : options.metrics) {
    require(m == "is" || m == "icl" || m == "detection", ErrorCode::InvalidArgument,
            "unknown metric '" + m + "' (is, icl, detection)");
  }
  const auto items = scan_generated(options.gen_dir);
  require(!items.empty(), ErrorCode::Dataset, "no generated images under " + options.gen_dir.string());
  std::map<std::string, std::vector<const GeneratedItem*>> by_category;
  for (const auto& it : items) by_category[it.category].push_back(&it);

  eval::MetricsReport report;
  report.details["generated_images"] = items.size();
  const auto note = [&](const std::string& w) {
    report.warnings.push_back(w);
    if (log) log("warning: " + w);
  };

  std::map<std::string, std::vector<Image>> images;
  for (const auto& [cat, list] : by_category) {
    for (const auto* it : list) images[cat].push_back(load_image(it->image));
  }

  if (options.metrics.count("is")) {
    const auto cls = load_kind<backends::ClassifierBackend>(options.backends, backends::BackendKind::Classifier);
    std::vector<std::optional<double>> per;
    for (const auto& [cat, imgs] : images) {
      if (imgs.size() < 2) {
        note("inception score skipped for " + cat + ": fewer than two images");
        continue;
      }
      const double v = eval::inception_score(imgs, *cls);
      report.details["is_per_category"][cat] = v;
      per.push_back(v);
    }
    report.is_score = mean_of(per);
    report.details["classifier"] = cls->identity();
  }

  if (options.metrics.count("icl")) {
    const auto dist =
        load_kind<backends::PerceptualDistanceBackend>(options.backends, backends::BackendKind::PerceptualDistance);
    std::vector<std::optional<double>> per;
    for (const auto& [cat, imgs] : images) {
      const auto r = eval::intra_cluster_lpips(imgs, std::vector<int>(imgs.size(), 0), *dist);
      for (const auto& w : r.warnings) note(cat + ": " + w);
      if (r.score) report.details["icl_per_category"][cat] = *r.score;
      per.push_back(r.score);
    }
    report.icl_score = mean_of(per);
    report.details["perceptual_distance"] = dist->identity();
  }

  if (options.metrics.count("detection")) {
    require(!options.dataset_dir.empty(), ErrorCode::InvalidArgument, "detection needs --dataset-dir");
    std::vector<eval::DetectionMetrics> per;
    for (const auto& [cat, list] : by_category) {
      std::vector<eval::LabeledImage> gen;
      for (std::size_t i = 0; i < list.size(); ++i) {
        gen.push_back({images[cat][i], mask::load_mask_png(list[i]->mask)});
      }
      std::vector<Image> normals;
      for (const auto& p : list_images(options.dataset_dir / cat / "train" / "good")) normals.push_back(load_image(p));
      if (normals.empty()) {
        note("detection skipped for " + cat + ": no training normals in the dataset directory");
        continue;
      }
      const auto det = eval::train_detector(gen, normals, options.detection, derive_seed(options.seed, cat));
      std::vector<eval::ScoreMap> maps;
      std::vector<mask::MaskCanvas> truth;
      for (const auto& t : index_test_split(options.dataset_dir, cat)) {
        const Image img = load_image(t.image);
        maps.push_back(det.predict(img));
        truth.push_back(t.mask ? mask::load_mask_png(*t.mask) : mask::MaskCanvas(img.width, img.height));
      }
      const auto d = eval::detection_metrics(maps, truth);
      report.details["detection_per_category"][cat] = eval::to_json(d);
      per.push_back(d);
      if (log) log("detection evaluated for " + cat);
    }
    if (!per.empty()) {
      eval::DetectionMetrics mean;
      const auto avg = [&](std::optional<double> eval::DetectionMetrics::*field) {
        std::vector<std::optional<double>> v;
        for (const auto& d : per) v.push_back(d.*field);
        mean.*field = mean_of(v);
      };
      for (auto f : {&eval::DetectionMetrics::i_auc, &eval::DetectionMetrics::i_ap, &eval::DetectionMetrics::i_f1,
                     &eval::DetectionMetrics::p_auc, &eval::DetectionMetrics::p_ap, &eval::DetectionMetrics::p_f1,
                     &eval::DetectionMetrics::pro}) {
        avg(f);
      }
      report.detection = mean;
    }
    report.details["detector_config"] = eval::to_json(options.detection);
  }
  return report;
}

}  // namespace anosynth::pipeline
