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

#include "anosynth/backends/synthetic.hpp"

#include <cmath>
#include <deque>

#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::backends {
namespace {

namespace F = torch::nn::functional;

torch::Tensor gaussian_tensor(Rng& rng, std::vector<int64_t> shape, double stddev) {
  int64_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = rng.normal(0.0, stddev);
  return torch::tensor(v, torch::kFloat64).reshape(shape);
}

std::string tensor_hash(std::initializer_list<const torch::Tensor*> tensors) {
  std::string bytes;
  for (const torch::Tensor* t : tensors) {
    const torch::Tensor c = t->contiguous();
    bytes.append(static_cast<const char*>(c.data_ptr()), c.numel() * c.element_size());
  }
  return sha256_hex(bytes).substr(0, 16);
}

torch::Tensor grayscale(const torch::Tensor& x) {
  return 0.299 * x.select(1, 0) + 0.587 * x.select(1, 1) + 0.114 * x.select(1, 2);
}

}  // namespace

SyntheticTextEncoder::SyntheticTextEncoder(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
  require(dim > 0, ErrorCode::InvalidArgument, "embedding dimension must be positive");
}

std::string SyntheticTextEncoder::identity() const {
  return "synthetic/text_encoder/seed=" + std::to_string(seed_) + "/dim=" + std::to_string(dim_);
}

Embedding SyntheticTextEncoder::embed_text(std::string_view text) const {
  Rng rng(derive_seed(seed_, text));
  Embedding v(static_cast<std::size_t>(dim_));
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

SyntheticImageEncoder::SyntheticImageEncoder(std::uint64_t seed, int dim, int side) : seed_(seed), dim_(dim) {
  require(dim > 0 && side > 0, ErrorCode::InvalidArgument, "invalid synthetic encoder shape");
  preprocess_.input_size = side;
  Rng rng(derive_seed(seed, "synthetic-image-encoder"));
  weights_ = gaussian_tensor(rng, {dim, int64_t(side) * side}, 1.0 / side);
}

std::string SyntheticImageEncoder::identity() const {
  return "synthetic/image_encoder/seed=" + std::to_string(seed_) + "/sha256=" + tensor_hash({&weights_});
}

torch::Tensor SyntheticImageEncoder::forward_preprocessed(const torch::Tensor& x) const {
  const torch::Tensor flat = grayscale(x).reshape({x.size(0), -1});
  return torch::matmul(flat, weights_.to(x.dtype()).t());
}

SyntheticFeatureExtractor::SyntheticFeatureExtractor(std::uint64_t seed, int channels) : seed_(seed) {
  Rng rng(derive_seed(seed, "synthetic-features"));
  w1_ = gaussian_tensor(rng, {channels, 3, 3, 3}, 1.0 / std::sqrt(27.0));
  b1_ = gaussian_tensor(rng, {channels}, 0.1);
  w2_ = gaussian_tensor(rng, {channels, channels, 3, 3}, 1.0 / std::sqrt(9.0 * channels));
  b2_ = gaussian_tensor(rng, {channels}, 0.1);
}

std::string SyntheticFeatureExtractor::identity() const {
  return "synthetic/features/seed=" + std::to_string(seed_) + "/sha256=" + tensor_hash({&w1_, &b1_, &w2_, &b2_});
}

std::vector<torch::Tensor> SyntheticFeatureExtractor::features(const torch::Tensor& x) const {
  const auto dt = x.dtype();
  const torch::Tensor f1 =
      torch::tanh(F::conv2d(x, w1_.to(dt), F::Conv2dFuncOptions().bias(b1_.to(dt)).padding(1)));
  const torch::Tensor pooled = F::avg_pool2d(f1, F::AvgPool2dFuncOptions(2));
  const torch::Tensor f2 =
      torch::tanh(F::conv2d(pooled, w2_.to(dt), F::Conv2dFuncOptions().bias(b2_.to(dt)).padding(1)));
  return {f1, f2};
}

std::string SyntheticSegmenter::identity() const {
  return "synthetic/segmenter/tolerance=" + std::to_string(tolerance_);
}

mask::MaskCanvas SyntheticSegmenter::segment(const Image& image, std::span<const PointPrompt> prompts) const {
  require(image.channels == 3, ErrorCode::InvalidArgument, "segmenter expects RGB input");
  mask::MaskCanvas out(image.width, image.height);
  std::array<double, 3> mean{0, 0, 0};
  int seeds = 0;
  for (const auto& p : prompts) {
    if (!p.positive || !out.contains(p.x, p.y)) continue;
    for (int c = 0; c < 3; ++c) mean[c] += image.at(p.x, p.y, c);
    ++seeds;
  }
  if (seeds == 0) return out;
  for (double& m : mean) m /= seeds;
  auto similar = [&](int x, int y) {
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) d2 += std::pow(image.at(x, y, c) - mean[c], 2);
    return d2 <= tolerance_ * tolerance_;
  };
  std::deque<std::pair<int, int>> queue;
  for (const auto& p : prompts) {
    if (p.positive && out.contains(p.x, p.y) && !out.at(p.x, p.y) && similar(p.x, p.y)) {
      out.set(p.x, p.y, true);
      queue.emplace_back(p.x, p.y);
    }
  }
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (out.contains(nx, ny) && !out.at(nx, ny) && similar(nx, ny)) {
        out.set(nx, ny, true);
        queue.emplace_back(nx, ny);
      }
    }
  }
  return out;
}

SyntheticClassifier::SyntheticClassifier(std::uint64_t seed, int classes) : seed_(seed), classes_(classes) {
  require(classes >= 2, ErrorCode::InvalidArgument, "classifier needs at least two classes");
  Rng rng(derive_seed(seed, "synthetic-classifier"));
  weights_.resize(static_cast<std::size_t>(classes) * 67);
  for (double& w : weights_) w = rng.normal(0.0, 4.0);
}

std::string SyntheticClassifier::identity() const {
  const std::string_view bytes(reinterpret_cast<const char*>(weights_.data()), weights_.size() * sizeof(double));
  return "synthetic/classifier/seed=" + std::to_string(seed_) + "/sha256=" + sha256_hex(bytes).substr(0, 16);
}

std::vector<double> SyntheticClassifier::class_probabilities(const Image& image) const {
  require(image.channels == 3, ErrorCode::InvalidArgument, "classifier expects RGB input");
  const Image thumb = resize_bicubic(image, 8, 8);
  std::vector<double> feat;
  feat.reserve(67);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      feat.push_back(0.299 * thumb.at(x, y, 0) + 0.587 * thumb.at(x, y, 1) + 0.114 * thumb.at(x, y, 2) - 0.5);
  for (int c = 0; c < 3; ++c) {
    double m = 0.0;
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x) m += image.at(x, y, c);
    feat.push_back(m / (double(image.width) * image.height) - 0.5);
  }
  std::vector<double> logits(classes_, 0.0);
  for (int k = 0; k < classes_; ++k)
    for (int i = 0; i < 67; ++i) logits[k] += weights_[k * 67 + i] * feat[i];
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) z += (l = std::exp(l - mx));
  for (double& l : logits) l /= z;
  return logits;
}

std::string SyntheticPerceptualDistance::identity() const {
  return "synthetic/perceptual_distance/" + features_.identity();
}

double SyntheticPerceptualDistance::distance(const Image& a, const Image& b) const {
  torch::NoGradGuard no_grad;
  const auto prep = [](const Image& im) { return image_to_tensor(resize_bicubic(im, 64, 64), torch::kFloat64); };
  const auto fa = features_.features(prep(a));
  const auto fb = features_.features(prep(b));
  double total = 0.0;
  for (std::size_t l = 0; l < fa.size(); ++l) {
    const auto na = unit_rows(fa[l].flatten(2)).flatten(1);
    const auto nb = unit_rows(fb[l].flatten(2)).flatten(1);
    total += (na - nb).pow(2).mean().item<double>();
  }
  return total;
}

}  // namespace anosynth::backends
