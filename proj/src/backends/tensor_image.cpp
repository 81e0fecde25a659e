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

#include "anosynth/backends/tensor_image.hpp"

#include <cstring>

#include "anosynth/core/error.hpp"

namespace anosynth::backends {

torch::Tensor image_to_tensor(const Image& image, torch::Dtype dtype) {
  require(!image.empty(), ErrorCode::InvalidArgument, "empty image");
  auto hwc = torch::from_blob(const_cast<float*>(image.data.data()),
                              {image.height, image.width, image.channels}, torch::kFloat32);
  return hwc.permute({2, 0, 1}).unsqueeze(0).to(dtype).contiguous().clone();
}

Image tensor_to_image(const torch::Tensor& tensor) {
  torch::Tensor t = tensor.detach();
  if (t.dim() == 4) {
    require(t.size(0) == 1, ErrorCode::InvalidArgument, "tensor_to_image expects a batch of one");
    t = t[0];
  }
  require(t.dim() == 3, ErrorCode::InvalidArgument, "tensor_to_image expects [C, H, W]");
  t = t.permute({1, 2, 0}).to(torch::kFloat32).contiguous();
  Image out(static_cast<int>(t.size(1)), static_cast<int>(t.size(0)), static_cast<int>(t.size(2)));
  std::memcpy(out.data.data(), t.data_ptr<float>(), out.data.size() * sizeof(float));
  return out;
}

torch::Tensor mask_to_tensor(const mask::MaskCanvas& mask, torch::Dtype dtype) {
  auto t = torch::from_blob(const_cast<std::uint8_t*>(mask.data().data()), {1, 1, mask.height(), mask.width()},
                            torch::kUInt8);
  return t.to(dtype).clone();
}

torch::Tensor embedding_to_tensor(const std::vector<double>& v, torch::Dtype dtype) {
  return torch::tensor(v, torch::kFloat64).to(dtype);
}

std::vector<double> tensor_to_embedding(const torch::Tensor& t) {
  const torch::Tensor flat = t.detach().reshape({-1}).to(torch::kFloat64).contiguous();
  return {flat.data_ptr<double>(), flat.data_ptr<double>() + flat.numel()};
}

}  // namespace anosynth::backends
