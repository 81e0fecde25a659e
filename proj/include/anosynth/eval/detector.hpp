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
#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anosynth/core/image.hpp"
#include "anosynth/eval/metrics.hpp"
#include "anosynth/mask/mask_canvas.hpp"

namespace anosynth::eval {

/// Training recipe of the downstream segmentation detector.
struct DetectionConfig {
  int image_size = 128;  // square side the detector runs at
  std::vector<int> widths{16, 32, 64};
  int epochs = 20;
  int batch_size = 8;
  double learning_rate = 1e-3;
  bool horizontal_flip = true;

  void validate() const;
};

nlohmann::json to_json(const DetectionConfig& c);
DetectionConfig detection_config_from_json(const nlohmann::json& j);
DetectionConfig load_detection_config(const std::filesystem::path& path);

struct LabeledImage {
  Image image;
  mask::MaskCanvas mask;
};

class DetectorNetImpl : public torch::nn::Module {
 public:
  explicit DetectorNetImpl(const std::vector<int>& widths);
  /// [N, 3, S, S] to per-pixel logits [N, 1, S, S].
  torch::Tensor forward(const torch::Tensor& x);

 private:
  std::vector<torch::nn::Sequential> down_;
  std::vector<torch::nn::Sequential> up_;
  torch::nn::Conv2d out_{nullptr};
};
TORCH_MODULE(DetectorNet);

class Detector {
 public:
  Detector(DetectorNet net, DetectionConfig cfg) : net_(std::move(net)), cfg_(std::move(cfg)) {}

  /// Anomaly probability per pixel at the image's own resolution.
  ScoreMap predict(const Image& image) const;
  std::string checksum() const;
  const DetectionConfig& config() const { return cfg_; }
  std::vector<double> epoch_losses;

 private:
  DetectorNet net_;
  DetectionConfig cfg_;
};

/// Trains on generated anomalies (mask supervision) plus real normals
/// (all-zero targets) with pixel-wise binary cross-entropy and Adam.
Detector train_detector(const std::vector<LabeledImage>& generated, const std::vector<Image>& normals,
                        const DetectionConfig& cfg, std::uint64_t seed);

}  // namespace anosynth::eval
