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

#include <torch/torch.h>

#include <vector>

#include "anosynth/core/image.hpp"
#include "anosynth/mask/mask_canvas.hpp"

namespace anosynth::backends {

/// HWC image to a [1, C, H, W] tensor.
torch::Tensor image_to_tensor(const Image& image, torch::Dtype dtype = torch::kFloat32);
/// [1, C, H, W] or [C, H, W] tensor to an HWC image. Values are not clamped.
Image tensor_to_image(const torch::Tensor& tensor);
/// Binary mask to a [1, 1, H, W] tensor of 0/1 values.
torch::Tensor mask_to_tensor(const mask::MaskCanvas& mask, torch::Dtype dtype = torch::kFloat32);

torch::Tensor embedding_to_tensor(const std::vector<double>& v, torch::Dtype dtype = torch::kFloat32);
std::vector<double> tensor_to_embedding(const torch::Tensor& t);

}  // namespace anosynth::backends
