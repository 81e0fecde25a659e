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


#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anosynth/backends/image_backends.hpp"
#include "anosynth/core/image.hpp"
#include "anosynth/mask/mask_canvas.hpp"

namespace anosynth::eval {

inline constexpr double kProFprLimit = 0.3;

/// exp(mean KL(p_i || p_marginal)) over per-image class distributions.
/// Rows must be non-negative and sum to one (within 1e-6).
double inception_score(const std::vector<std::vector<double>>& probabilities);
double inception_score(const std::vector<Image>& images, const backends::ClassifierBackend& classifier);

struct IclResult {
  std::optional<double> score;  // absent when no cluster has two images
  int clusters_used = 0;
  std::vector<std::string> warnings;
};

/// Mean over clusters of the mean pairwise distance inside each cluster.
/// `cluster_of[i]` labels image i; singleton clusters are skipped with a
/// warning. Pairs are reduced in sorted (i, j) order.
IclResult intra_cluster_lpips(const std::vector<Image>& images, const std::vector<int>& cluster_of,
                              const backends::PerceptualDistanceBackend& distance);

/// Same reduction over a precomputed symmetric distance accessor.
IclResult intra_cluster_mean(int count, const std::vector<int>& cluster_of,
                             const std::function<double(int, int)>& distance);

/// Rank statistic with midranks for ties. Absent if a class is missing.
std::optional<double> auroc(const std::vector<double>& scores, const std::vector<bool>& labels);
/// Sum over distinct thresholds (descending) of recall increment * precision.
std::optional<double> average_precision(const std::vector<double>& scores, const std::vector<bool>& labels);
/// Best F1 over all distinct score thresholds.
std::optional<double> max_f1(const std::vector<double>& scores, const std::vector<bool>& labels);

/// Per-pixel anomaly scores of one image.
struct ScoreMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float max() const;
};

struct ProPoint {
  double fpr = 0.0;
  double pro = 0.0;
};

/// (FPR, mean per-region overlap) as the threshold sweeps down through every
/// distinct score. Regions are 8-connected ground-truth components pooled
/// over all images.
std::vector<ProPoint> pro_curve(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth);
/// Trapezoidal area under the PRO curve up to `fpr_limit`, divided by it.
std::optional<double> pro_score(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth,
                                double fpr_limit = kProFprLimit);

struct DetectionMetrics {
  std::optional<double> i_auc, i_ap, i_f1;
  std::optional<double> p_auc, p_ap, p_f1;
  std::optional<double> pro;
};

/// Image score is the maximum of its pixel map; image label is whether its
/// mask is non-empty.
DetectionMetrics detection_metrics(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth);

struct MetricsReport {
  std::optional<double> is_score;
  std::optional<double> icl_score;
  std::optional<DetectionMetrics> detection;
  std::vector<std::string> warnings;
  nlohmann::json details = nlohmann::json::object();
};

inline constexpr const char* kMetricsSchema = "anosynth.metrics/1";

nlohmann::json to_json(const DetectionMetrics& d);
nlohmann::json to_json(const MetricsReport& r);

}  // namespace anosynth::eval
