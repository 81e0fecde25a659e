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


#include "anosynth/eval/detector.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::eval {
namespace {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

nn::Sequential conv_relu(int in, int out, int stride) {
  return nn::Sequential(nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1)), nn::ReLU());
}

nn::Sequential stage(int in, int out, int stride) {
  nn::Sequential s;
  s->extend(*conv_relu(in, out, stride));
  s->extend(*conv_relu(out, out, 1));
  return s;
}

torch::Tensor resize_to(const torch::Tensor& x, int side, torch::nn::functional::InterpolateFuncOptions::mode_t mode) {
  auto opts = F::InterpolateFuncOptions().size(std::vector<int64_t>{side, side}).mode(mode);
  if (!std::holds_alternative<torch::enumtype::kNearest>(mode)) opts = opts.align_corners(false);
  return F::interpolate(x, opts);
}

struct Sample {
  torch::Tensor image;   // [3, S, S]
  torch::Tensor target;  // [1, S, S]
};

Sample prepare(const Image& image, const mask::MaskCanvas* mask, int side) {
  Sample s;
  s.image = resize_to(backends::image_to_tensor(image), side, torch::kBicubic).clamp(0.0, 1.0)[0];
  if (mask != nullptr) {
    require(mask->width() == image.width && mask->height() == image.height, ErrorCode::DimensionMismatch,
            "detector training image and mask differ in size");
    s.target = resize_to(backends::mask_to_tensor(*mask), side, torch::kNearest)[0];
  } else {
    s.target = torch::zeros({1, side, side});
  }
  return s;
}

}  // namespace

void DetectionConfig::validate() const {
  require(image_size >= 8, ErrorCode::InvalidArgument, "detector image_size must be at least 8");
  require(!widths.empty(), ErrorCode::InvalidArgument, "detector needs at least one stage");
  for (int w : widths) require(w > 0, ErrorCode::InvalidArgument, "detector widths must be positive");
  require(epochs >= 1 && batch_size >= 1, ErrorCode::InvalidArgument, "epochs and batch_size must be >= 1");
  require(learning_rate > 0.0, ErrorCode::InvalidArgument, "learning rate must be positive");
}

nlohmann::json to_json(const DetectionConfig& c) {
  return {{"image_size", c.image_size}, {"widths", c.widths},         {"epochs", c.epochs},
          {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
          {"horizontal_flip", c.horizontal_flip}, {"loss", "pixel_bce"}};
}

DetectionConfig detection_config_from_json(const nlohmann::json& j) {
  DetectionConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "image_size") c.image_size = value.get<int>();
    else if (key == "widths") c.widths = value.get<std::vector<int>>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "horizontal_flip") c.horizontal_flip = value.get<bool>();
    else if (key == "loss") require(value == "pixel_bce", ErrorCode::InvalidArgument, "only pixel_bce is supported");
    else fail(ErrorCode::InvalidArgument, "unknown detector config key '" + key + "'");
  }
  c.validate();
  return c;
}

DetectionConfig load_detection_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open detector config " + path.string());
  try {
    return detection_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, "malformed detector config " + path.string() + ": " + e.what());
  }
}

DetectorNetImpl::DetectorNetImpl(const std::vector<int>& widths) {
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const int in = i == 0 ? 3 : widths[i - 1];
    down_.push_back(register_module("down" + std::to_string(i), stage(in, widths[i], i == 0 ? 1 : 2)));
  }
  for (std::size_t i = widths.size() - 1; i > 0; --i) {
    up_.push_back(register_module("up" + std::to_string(i), stage(widths[i] + widths[i - 1], widths[i - 1], 1)));
  }
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(widths[0], 1, 1)));
}

torch::Tensor DetectorNetImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> skips;
  auto y = x;
  for (auto& d : down_) {
    y = d->forward(y);
    skips.push_back(y);
  }
  for (std::size_t k = 0; k < up_.size(); ++k) {
    const auto& skip = skips[skips.size() - 2 - k];
    y = F::interpolate(y, F::InterpolateFuncOptions()
                              .size(std::vector<int64_t>{skip.size(2), skip.size(3)})
                              .mode(torch::kNearest));
    y = up_[k]->forward(torch::cat({y, skip}, 1));
  }
  return out_->forward(y);
}

ScoreMap Detector::predict(const Image& image) const {
  torch::NoGradGuard guard;
  auto& net = const_cast<DetectorNet&>(net_);
  net->eval();
  const auto x = resize_to(backends::image_to_tensor(image), cfg_.image_size, torch::kBicubic).clamp(0.0, 1.0);
  auto p = torch::sigmoid(net->forward(x));
  p = F::interpolate(p, F::InterpolateFuncOptions()
                            .size(std::vector<int64_t>{image.height, image.width})
                            .mode(torch::kBilinear)
                            .align_corners(false))
          .contiguous();
  ScoreMap m;
  m.width = image.width;
  m.height = image.height;
  m.data.assign(p.data_ptr<float>(), p.data_ptr<float>() + p.numel());
  return m;
}

std::string Detector::checksum() const {
  std::string bytes;
  for (const auto& p : net_->parameters()) {
    const auto c = p.detach().contiguous();
    bytes.append(static_cast<const char*>(c.data_ptr()), c.numel() * c.element_size());
  }
  return sha256_hex(bytes);
}

Detector train_detector(const std::vector<LabeledImage>& generated, const std::vector<Image>& normals,
                        const DetectionConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require(!generated.empty(), ErrorCode::InvalidArgument, "detector training needs generated anomalies");
  require(!normals.empty(), ErrorCode::InvalidArgument, "detector training needs normal images");

  std::vector<Sample> data;
  data.reserve(generated.size() + normals.size());
  for (const auto& g : generated) data.push_back(prepare(g.image, &g.mask, cfg.image_size));
  for (const auto& n : normals) data.push_back(prepare(n, nullptr, cfg.image_size));

  DetectorNet net(cfg.widths);
  {
    torch::NoGradGuard guard;
    Rng init(derive_seed(seed, "detector-init"));
    for (auto& item : net->named_parameters()) {
      auto& p = item.value();
      if (p.dim() == 4) {
        const double bound = std::sqrt(6.0 / static_cast<double>(p.size(1) * p.size(2) * p.size(3)));
        std::vector<double> v(static_cast<std::size_t>(p.numel()));
        for (double& x : v) x = init.uniform(-bound, bound);
        p.copy_(torch::tensor(v, torch::kFloat64).reshape(p.sizes()));
      } else {
        p.zero_();
      }
    }
  }
  net->train();
  torch::optim::Adam opt(net->parameters(), torch::optim::AdamOptions(cfg.learning_rate));
  Detector detector(net, cfg);

  Rng rng(derive_seed(seed, "detector-train"));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<torch::Tensor> xs, ys;
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = data[order[k]];
        const bool flip = cfg.horizontal_flip && rng.bernoulli(0.5);
        xs.push_back(flip ? s.image.flip({2}) : s.image);
        ys.push_back(flip ? s.target.flip({2}) : s.target);
      }
      const auto loss = F::binary_cross_entropy_with_logits(net->forward(torch::stack(xs)), torch::stack(ys));
      opt.zero_grad();
      loss.backward();
      opt.step();
      epoch_loss += loss.item<double>() * static_cast<double>(end - start);
    }
    detector.epoch_losses.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return detector;
}

}  // namespace anosynth::eval
