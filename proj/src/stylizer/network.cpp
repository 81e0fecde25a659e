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


#include "anosynth/stylizer/network.hpp"

#include <cmath>
#include <string>

#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::stylizer {
namespace {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

nn::Sequential conv_norm_act(int in, int out, int stride, double slope) {
  return nn::Sequential(
      nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1)),
      nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out).affine(true)),
      nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(slope)));
}

nn::Sequential double_conv(int in, int out, int first_stride, double slope) {
  nn::Sequential seq;
  seq->extend(*conv_norm_act(in, out, first_stride, slope));
  seq->extend(*conv_norm_act(out, out, 1, slope));
  return seq;
}

}  // namespace

void NetworkConfig::validate() const {
  require(down_blocks == 3 && up_blocks == 3, ErrorCode::InvalidArgument,
          "the stylization network has exactly 3 down and 3 up blocks");
  for (int w : widths) require(w > 0, ErrorCode::InvalidArgument, "network widths must be positive");
  require(leaky_slope >= 0.0 && leaky_slope < 1.0, ErrorCode::InvalidArgument,
          "leaky slope must lie in [0, 1)");
}

StylizationNetImpl::StylizationNetImpl(const NetworkConfig& config) : config_(config) {
  config_.validate();
  const auto& w = config_.widths;
  const double s = config_.leaky_slope;
  head_ = register_module("head", double_conv(3, w[0], 1, s));
  for (int i = 0; i < 3; ++i) {
    down_[i] = register_module("down" + std::to_string(i + 1), double_conv(w[i], w[i + 1], 2, s));
  }
  if (config_.bottleneck) bottleneck_ = register_module("bottleneck", conv_norm_act(w[3], w[3], 1, s));
  // Stage i maps width w[i + 1] back to w[i] at the resolution of skip i.
  for (int i = 2; i >= 0; --i) {
    const std::string tag = std::to_string(i + 1);
    up_reduce_[i] = register_module("up" + tag + "_reduce", conv_norm_act(w[i + 1], w[i], 1, s));
    up_merge_[i] = register_module("up" + tag + "_merge", conv_norm_act(2 * w[i], w[i], 1, s));
  }
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(w[0], 3, 1)));
}

torch::Tensor StylizationNetImpl::up(int stage, const torch::Tensor& x, const torch::Tensor& skip) {
  auto y = F::interpolate(x, F::InterpolateFuncOptions()
                                 .size(std::vector<int64_t>{skip.size(2), skip.size(3)})
                                 .mode(torch::kNearest));
  y = up_reduce_[stage]->forward(y);
  return up_merge_[stage]->forward(torch::cat({y, skip}, 1));
}

torch::Tensor StylizationNetImpl::forward(const torch::Tensor& x) {
  require(x.dim() == 4 && x.size(1) == 3, ErrorCode::DimensionMismatch,
          "stylization network expects [N, 3, H, W]");
  require(x.size(2) >= 16 && x.size(3) >= 16, ErrorCode::DimensionMismatch,
          "stylization network needs images of at least 16x16");
  const auto s0 = head_->forward(x);
  const auto s1 = down_[0]->forward(s0);
  const auto s2 = down_[1]->forward(s1);
  auto y = down_[2]->forward(s2);
  if (config_.bottleneck) y = bottleneck_->forward(y);
  y = up(2, y, s2);
  y = up(1, y, s1);
  y = up(0, y, s0);
  return torch::sigmoid(out_->forward(y));
}

StylizationNet init_network(const NetworkConfig& config, std::uint64_t seed, torch::Dtype dtype) {
  StylizationNet net(config);
  net->to(dtype);
  Rng rng(derive_seed(seed, "stylization-network"));
  torch::NoGradGuard guard;
  // He-uniform for leaky activations, zero biases, unit norm scales.
  const double gain2 = 2.0 / (1.0 + config.leaky_slope * config.leaky_slope);
  for (auto& item : net->named_parameters()) {
    auto& p = item.value();
    const std::string& name = item.key();
    if (p.dim() == 4) {
      const double fan_in = static_cast<double>(p.size(1) * p.size(2) * p.size(3));
      const double bound = std::sqrt(3.0 * gain2 / fan_in);
      std::vector<double> v(static_cast<std::size_t>(p.numel()));
      for (double& x : v) x = rng.uniform(-bound, bound);
      p.copy_(torch::tensor(v, torch::kFloat64).reshape(p.sizes()));
    } else if (name.ends_with("weight")) {  // instance-norm scale
      p.fill_(1.0);
    } else {
      p.zero_();
    }
  }
  return net;
}

std::int64_t count_parameters(const StylizationNet& net) {
  std::int64_t n = 0;
  for (const auto& p : net->parameters()) {
    if (p.requires_grad()) n += p.numel();
  }
  return n;
}

std::string parameter_checksum(const torch::nn::Module& module) {
  std::string bytes;
  for (const auto& p : module.parameters()) {
    const auto c = p.detach().contiguous();
    bytes.append(static_cast<const char*>(c.data_ptr()), c.numel() * c.element_size());
  }
  return sha256_hex(bytes);
}

}  // namespace anosynth::stylizer
