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

// Backends that sit inside the stylization objective and must propagate
// gradients back to the image.

#include <torch/torch.h>

#include <array>
#include <string>
#include <vector>

#include "anosynth/backends/text_encoder.hpp"

namespace anosynth::backends {

/// Input preparation owned by an image encoder: square bicubic resize to
/// `input_size` followed by per-channel (x - mean) / std.
struct Preprocess {
  int input_size = 224;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};
};

/// Differentiable. `x` is [N, 3, H, W] with values in [0, 1].
torch::Tensor preprocess_for_encoder(const torch::Tensor& x, const Preprocess& spec);

/// Row-wise L2 normalization used at every encoder boundary.
torch::Tensor unit_rows(const torch::Tensor& x);

class ImageEncoder : public Backend {
 public:
  virtual int embedding_dim() const = 0;
  virtual const Preprocess& preprocess() const = 0;

  /// [N, 3, H, W] in [0, 1] to [N, D] unit rows; differentiable in `x`.
  torch::Tensor encode(const torch::Tensor& x) const;
  Embedding embed_image(const Image& image) const;

 protected:
  /// Receives the output of preprocess_for_encoder.
  virtual torch::Tensor forward_preprocessed(const torch::Tensor& x) const = 0;
};

class PerceptualFeatureExtractor : public Backend {
 public:
  virtual std::vector<std::string> layers() const = 0;
  /// One map per entry of layers(), in order; `x` is [N, 3, H, W] in [0, 1].
  virtual std::vector<torch::Tensor> features(const torch::Tensor& x) const = 0;
};

}  // namespace anosynth::backends
