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

#include "anosynth/backends/torch_backends.hpp"

#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"

namespace anosynth::backends {

namespace F = torch::nn::functional;

torch::Tensor preprocess_for_encoder(const torch::Tensor& x, const Preprocess& spec) {
  require(x.dim() == 4 && x.size(1) == 3, ErrorCode::InvalidArgument, "encoder input must be [N, 3, H, W]");
  torch::Tensor y = x;
  if (x.size(2) != spec.input_size || x.size(3) != spec.input_size) {
    y = F::interpolate(x, F::InterpolateFuncOptions()
                              .size(std::vector<int64_t>{spec.input_size, spec.input_size})
                              .mode(torch::kBicubic)
                              .align_corners(false));
  }
  const auto opts = torch::TensorOptions().dtype(x.dtype());
  const auto mean = torch::tensor({spec.mean[0], spec.mean[1], spec.mean[2]}, opts).view({1, 3, 1, 1});
  const auto std = torch::tensor({spec.std[0], spec.std[1], spec.std[2]}, opts).view({1, 3, 1, 1});
  return (y - mean) / std;
}

torch::Tensor unit_rows(const torch::Tensor& x) {
  return F::normalize(x, F::NormalizeFuncOptions().p(2).dim(1).eps(1e-12));
}

torch::Tensor ImageEncoder::encode(const torch::Tensor& x) const {
  const torch::Tensor out = forward_preprocessed(preprocess_for_encoder(x, preprocess()));
  require(out.dim() == 2 && out.size(1) == embedding_dim(), ErrorCode::Backend,
          "image encoder returned an unexpected shape");
  return unit_rows(out);
}

Embedding ImageEncoder::embed_image(const Image& image) const {
  torch::NoGradGuard no_grad;
  return tensor_to_embedding(encode(image_to_tensor(image)));
}

}  // namespace anosynth::backends
