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

#include <string>
#include <vector>

#include "anosynth/backends/torch_backends.hpp"

namespace anosynth::stylizer {

struct TrainHyperparams {
  int iterations = 75;
  double learning_rate = 5e-4;
  int patch_count = 64;
  int patch_side = 128;
  double perspective_distortion = 0.5;
  double lambda_gdir = 5e2;
  double lambda_pdir = 9e3;
  double lambda_tv = 2e-3;
  double lambda_c = 150.0;
  double lambda_mclip = 1e3;

  /// Checks ranges; with positive dimensions also checks patch_side fits.
  void validate(int image_width = 0, int image_height = 0) const;
};

nlohmann::json to_json(const TrainHyperparams& hp);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainHyperparams hyperparams_from_json(const nlohmann::json& j);

struct LossParts {
  double gdir = 0.0;
  double pdir = 0.0;
  double mclip = 0.0;
  double content = 0.0;
  double tv = 0.0;
};

struct LossBreakdown {
  double gdir = 0.0;
  double pdir = 0.0;
  double mwcd = 0.0;
  double mclip = 0.0;
  double content = 0.0;
  double tv = 0.0;
  double total = 0.0;
};

nlohmann::json to_json(const LossBreakdown& b);

/// Weighted combination of the parts. Throws NonFinite naming every
/// offending term.
LossBreakdown total_loss(const LossParts& parts, const TrainHyperparams& hp);

/// 1 - cos(h_I_a - h_I_n, h_T_a - h_T_n). Vectors are 1-D or [1, D].
/// Throws DegenerateDirection when either difference is exactly zero.
torch::Tensor loss_gdir(const torch::Tensor& h_I_n, const torch::Tensor& h_I_a,
                        const torch::Tensor& h_T_n, const torch::Tensor& h_T_a);

/// Overlap-weighted mean of 1 - cos(patch_embeddings[j] - h_I_n, h_T_a - h_T_n).
/// Rows with zero weight are dropped before any arithmetic. Returns an exact
/// zero when all weights vanish.
torch::Tensor loss_pdir_embeddings(const torch::Tensor& patch_embeddings,
                                   const std::vector<double>& overlaps, const torch::Tensor& h_I_n,
                                   const torch::Tensor& h_T_n, const torch::Tensor& h_T_a);

/// 1 - cos(E(image * mask), h_T_a). Throws EmptyMask for an all-zero mask.
torch::Tensor loss_mclip(const torch::Tensor& generated, const torch::Tensor& mask,
                         const torch::Tensor& h_T_a, const backends::ImageEncoder& encoder);

/// Sum over extractor layers of the mean squared feature difference.
torch::Tensor loss_content(const torch::Tensor& input, const torch::Tensor& generated,
                           const backends::PerceptualFeatureExtractor& extractor);
torch::Tensor loss_content_features(const std::vector<torch::Tensor>& a,
                                    const std::vector<torch::Tensor>& b);

/// mean(dx^2) + mean(dy^2) over forward differences. Needs H, W >= 2.
torch::Tensor loss_tv(const torch::Tensor& image);

/// Network output where mask = 1, input elsewhere (select, not blend).
torch::Tensor composite_output(const torch::Tensor& network_output, const torch::Tensor& input,
                               const torch::Tensor& mask);

}  // namespace anosynth::stylizer
