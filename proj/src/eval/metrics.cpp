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


#include "anosynth/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "anosynth/core/error.hpp"

namespace anosynth::eval {
namespace {

void check_scores(const std::vector<double>& scores, const std::vector<bool>& labels) {
  require(scores.size() == labels.size(), ErrorCode::DimensionMismatch, "one label per score is required");
  for (double s : scores) require(std::isfinite(s), ErrorCode::NonFinite, "scores must be finite");
}

std::vector<std::size_t> order_descending(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Calls fn(tp, fp) after each group of tied scores, highest scores first.
template <typename Fn>
void sweep_thresholds(const std::vector<double>& scores, const std::vector<bool>& labels, Fn fn) {
  const auto idx = order_descending(scores);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      labels[idx[j]] ? ++tp : ++fp;
      ++j;
    }
    fn(tp, fp);
    i = j;
  }
}



}  // namespace

double inception_score(const std::vector<std::vector<double>>& probabilities) {
  require(probabilities.size() >= 2, ErrorCode::InvalidArgument, "inception score needs at least two images");
  const std::size_t k = probabilities.front().size();
  require(k > 0, ErrorCode::InvalidArgument, "empty class distribution");
  std::vector<double> marginal(k, 0.0);
  for (const auto& p : probabilities) {
    require(p.size() == k, ErrorCode::DimensionMismatch, "class distributions differ in length");
    double sum = 0.0;
    for (double v : p) {
      require(std::isfinite(v) && v >= 0.0, ErrorCode::Backend, "classifier returned a negative or non-finite probability");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-6, ErrorCode::Backend, "classifier probabilities do not sum to one");
    for (std::size_t c = 0; c < k; ++c) marginal[c] += p[c];
  }
  for (double& m : marginal) m /= static_cast<double>(probabilities.size());
  double kl_sum = 0.0;
  for (const auto& p : probabilities) {
    for (std::size_t c = 0; c < k; ++c) {
      if (p[c] > 0.0) kl_sum += p[c] * std::log(p[c] / marginal[c]);
    }
  }
  return std::exp(kl_sum / static_cast<double>(probabilities.size()));
}

double inception_score(const std::vector<Image>& images, const backends::ClassifierBackend& classifier) {
  std::vector<std::vector<double>> probs;
  probs.reserve(images.size());
  for (const auto& img : images) probs.push_back(classifier.class_probabilities(img));
  return inception_score(probs);
}

IclResult intra_cluster_mean(int count, const std::vector<int>& cluster_of,
                             const std::function<double(int, int)>& distance) {
  require(static_cast<int>(cluster_of.size()) == count, ErrorCode::DimensionMismatch,
          "one cluster label per image is required");
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < count; ++i) clusters[cluster_of[i]].push_back(i);
  IclResult out;
  double total = 0.0;
  for (const auto& [label, members] : clusters) {
    if (members.size() < 2) {
      out.warnings.push_back("cluster " + std::to_string(label) + " has a single image and is excluded");
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double d = distance(members[a], members[b]);
        require(std::isfinite(d) && d >= 0.0, ErrorCode::Backend, "perceptual distance must be finite and >= 0");
        sum += d;
        ++pairs;
      }
    }
    total += sum / static_cast<double>(pairs);
    ++out.clusters_used;
  }
  if (out.clusters_used > 0) out.score = total / out.clusters_used;
  return out;
}

IclResult intra_cluster_lpips(const std::vector<Image>& images, const std::vector<int>& cluster_of,
                              const backends::PerceptualDistanceBackend& distance) {
  return intra_cluster_mean(static_cast<int>(images.size()), cluster_of,
                            [&](int a, int b) { return distance.distance(images[a], images[b]); });
}

std::optional<double> auroc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  check_scores(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]]) {
        rank_sum += midrank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::optional<double> average_precision(const std::vector<double>& scores, const std::vector<bool>& labels) {
  check_scores(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) return std::nullopt;
  double ap = 0.0, prev_recall = 0.0;
  sweep_thresholds(scores, labels, [&](std::size_t tp, std::size_t fp) {
    const double recall = static_cast<double>(tp) / positives;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  });
  return ap;
}

std::optional<double> max_f1(const std::vector<double>& scores, const std::vector<bool>& labels) {
  check_scores(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) return std::nullopt;
  double best = 0.0;
  sweep_thresholds(scores, labels, [&](std::size_t tp, std::size_t fp) {
    const double f1 = 2.0 * tp / static_cast<double>(2 * tp + fp + (positives - tp));
    best = std::max(best, f1);
  });
  return best;
}

float ScoreMap::max() const {
  require(!data.empty(), ErrorCode::InvalidArgument, "empty score map");
  return *std::max_element(data.begin(), data.end());
}

std::vector<ProPoint> pro_curve(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth) {
  require(maps.size() == truth.size(), ErrorCode::DimensionMismatch, "one ground-truth mask per score map");
  // Pool pixels; each carries its score and region id (-1 for normal).
  std::vector<float> score;
  std::vector<int> region;
  std::vector<double> region_size;
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& m = maps[i];
    require(m.width == truth[i].width() && m.height == truth[i].height(), ErrorCode::DimensionMismatch,
            "score map and mask differ in size");
    const auto labels = mask::label_components(truth[i]);
    const int base = static_cast<int>(region_size.size());
    for (auto s : labels.sizes) region_size.push_back(static_cast<double>(s));
    for (std::size_t p = 0; p < m.data.size(); ++p) {
      score.push_back(m.data[p]);
      const int l = labels.labels[p];
      region.push_back(l > 0 ? base + l - 1 : -1);
      if (l == 0) ++negatives;
    }
  }
  std::vector<ProPoint> curve;
  if (region_size.empty() || negatives == 0) return curve;
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const double k = static_cast<double>(region_size.size());
  std::size_t fp = 0;
  double pro = 0.0;
  curve.push_back({0.0, 0.0});
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && score[idx[j]] == score[idx[i]]) {
      const int r = region[idx[j]];
      if (r < 0) {
        ++fp;
      } else {
        pro += 1.0 / (k * region_size[static_cast<std::size_t>(r)]);
      }
      ++j;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives), std::min(pro, 1.0)});
    i = j;
  }
  return curve;
}

std::optional<double> pro_score(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth,
                                double fpr_limit) {
  require(fpr_limit > 0.0 && fpr_limit <= 1.0, ErrorCode::InvalidArgument, "PRO limit must lie in (0, 1]");
  const auto curve = pro_curve(maps, truth);
  if (curve.empty()) return std::nullopt;
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    if (a.fpr >= fpr_limit) break;
    if (b.fpr <= fpr_limit) {
      area += 0.5 * (b.fpr - a.fpr) * (a.pro + b.pro);
    } else {
      const double t = (fpr_limit - a.fpr) / (b.fpr - a.fpr);
      const double pro_at = a.pro + t * (b.pro - a.pro);
      area += 0.5 * (fpr_limit - a.fpr) * (a.pro + pro_at);
      break;
    }
  }
  return area / fpr_limit;
}

DetectionMetrics detection_metrics(const std::vector<ScoreMap>& maps, const std::vector<mask::MaskCanvas>& truth) {
  require(maps.size() == truth.size() && !maps.empty(), ErrorCode::DimensionMismatch,
          "detection metrics need one mask per score map");
  std::vector<double> image_scores, pixel_scores;
  std::vector<bool> image_labels, pixel_labels;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    require(maps[i].width == truth[i].width() && maps[i].height == truth[i].height(), ErrorCode::DimensionMismatch,
            "score map and mask differ in size");
    image_scores.push_back(maps[i].max());
    image_labels.push_back(truth[i].any());
    for (std::size_t p = 0; p < maps[i].data.size(); ++p) {
      pixel_scores.push_back(maps[i].data[p]);
      pixel_labels.push_back(truth[i].data()[p] != 0);
    }
  }
  DetectionMetrics d;
  d.i_auc = auroc(image_scores, image_labels);
  d.i_ap = average_precision(image_scores, image_labels);
  d.i_f1 = max_f1(image_scores, image_labels);
  d.p_auc = auroc(pixel_scores, pixel_labels);
  d.p_ap = average_precision(pixel_scores, pixel_labels);
  d.p_f1 = max_f1(pixel_scores, pixel_labels);
  d.pro = pro_score(maps, truth);
  return d;
}

nlohmann::json to_json(const DetectionMetrics& d) {
  const auto v = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  return {{"i_auc", v(d.i_auc)}, {"i_ap", v(d.i_ap)}, {"i_f1", v(d.i_f1)}, {"p_auc", v(d.p_auc)},
          {"p_ap", v(d.p_ap)},   {"p_f1", v(d.p_f1)}, {"pro", v(d.pro)}};
}

nlohmann::json to_json(const MetricsReport& r) {
  const auto v = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["schema"] = kMetricsSchema;
  j["is_score"] = v(r.is_score);
  j["icl_score"] = v(r.icl_score);
  j["detection"] = r.detection ? to_json(*r.detection) : nlohmann::json(nullptr);
  // Protocol conventions are stated in every report.
  j["conventions"] = {{"image_score", "max_of_pixel_map"},
                      {"pro_fpr_limit", kProFprLimit},
                      {"pro_integration", "trapezoid_normalized_by_limit"},
                      {"auroc_ties", "midrank"},
                      {"icl_cluster", "category"}};
  j["warnings"] = r.warnings;
  j["details"] = r.details;
  return j;
}

}  // namespace anosynth::eval
