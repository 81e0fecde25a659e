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

#include <array>
#include <cstdint>

namespace anosynth::stylizer {

/// Widths of the 3-down / 3-up encoder-decoder. widths[0] is the full
/// resolution stage; each down block doubles the previous width by default.
struct NetworkConfig {
  int down_blocks = 3;
  int up_blocks = 3;
  std::array<int, 4> widths{16, 32, 64, 128};
  double leaky_slope = 0.2;
  bool bottleneck = true;

  void validate() const;
};

class StylizationNetImpl : public torch::nn::Module {
 public:
  explicit StylizationNetImpl(const NetworkConfig& config);

  /// [N, 3, H, W] in [0, 1] to the same shape, squashed into (0, 1) by a
  /// sigmoid. H and W must be at least 16.
  torch::Tensor forward(const torch::Tensor& x);

  const NetworkConfig& config() const { return config_; }

 private:
  torch::Tensor up(int stage, const torch::Tensor& x, const torch::Tensor& skip);

  NetworkConfig config_;
  torch::nn::Sequential head_{nullptr};
  std::array<torch::nn::Sequential, 3> down_{nullptr, nullptr, nullptr};
  torch::nn::Sequential bottleneck_{nullptr};
  std::array<torch::nn::Sequential, 3> up_reduce_{nullptr, nullptr, nullptr};
  std::array<torch::nn::Sequential, 3> up_merge_{nullptr, nullptr, nullptr};
  torch::nn::Conv2d out_{nullptr};
};
TORCH_MODULE(StylizationNet);

/// Fresh network with parameters drawn from the project RNG, so the initial
/// state depends only on `seed` (not on libtorch's global generator).
StylizationNet init_network(const NetworkConfig& config, std::uint64_t seed,
                            torch::Dtype dtype = torch::kFloat32);

std::int64_t count_parameters(const StylizationNet& net);

/// SHA-256 over all parameter bytes in registration order.
std::string parameter_checksum(const torch::nn::Module& module);

}  // namespace anosynth::stylizer
