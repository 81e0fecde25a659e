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
#include <functional>
#include <vector>

#include "anosynth/backends/torch_backends.hpp"
#include "anosynth/core/image.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/prompt/prompts.hpp"
#include "anosynth/stylizer/network.hpp"
#include "anosynth/stylizer/patches.hpp"

namespace anosynth::stylizer {

struct StylizerBackends {
  const backends::ImageEncoder* image_encoder = nullptr;
  const backends::PerceptualFeatureExtractor* features = nullptr;
};

/// Everything the objective needs that stays fixed during one job.
class Objective {
 public:
  Objective(const torch::Tensor& input, const mask::MaskCanvas& mask,
            const prompt::PromptEmbeddings& text, const StylizerBackends& backends,
            const TrainHyperparams& hp);

  struct Result {
    torch::Tensor total;      // differentiable scalar
    torch::Tensor composite;  // the image every term was computed on
    LossBreakdown breakdown;
    int pdir_patches = 0;  // patches with non-zero overlap
  };

  /// Loss of a raw network output under a given patch plan.
  Result evaluate(const torch::Tensor& network_output, const std::vector<PatchPlan>& plans) const;

  const torch::Tensor& input() const { return input_; }
  const torch::Tensor& mask() const { return mask_t_; }

 private:
  torch::Tensor input_;
  torch::Tensor mask_t_;
  const mask::MaskCanvas& mask_;
  torch::Tensor h_T_n_, h_T_a_, h_I_n_;
  std::vector<torch::Tensor> input_features_;
  StylizerBackends backends_;
  TrainHyperparams hp_;
};

struct IterationRecord {
  int iteration = 0;
  LossBreakdown loss;
  int pdir_patches = 0;
};

nlohmann::json to_json(const IterationRecord& r);

struct StylizationResult {
  Image image;                 // composited, float in [0, 1]
  std::vector<IterationRecord> trace;  // one per iteration, before its step
  LossBreakdown final_loss;    // after the last step, on the first iteration's patches
  LossBreakdown initial_loss;  // trace.front().loss
  int pdir_empty_steps = 0;
  std::string network_checksum;
};

struct StylizationOptions {
  NetworkConfig network;
  torch::Dtype dtype = torch::kFloat32;
  /// Called before each step with the composite of that iteration.
  std::function<void(int, const torch::Tensor&)> on_iteration;
};

/// Trains a fresh network on one image and returns the composited result.
StylizationResult run_stylization(const Image& image, const mask::MaskCanvas& mask,
                                  const prompt::PromptEmbeddings& text, const StylizerBackends& backends,
                                  const TrainHyperparams& hp, std::uint64_t seed,
                                  const StylizationOptions& options = {});

}  // namespace anosynth::stylizer
