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

// Deterministic stand-ins for every backend. Each is a pure function of its
// seed and its input, cheap enough for unit tests, and (where it sits in the
// objective) differentiable in closed form.

#include <cstdint>

#include "anosynth/backends/image_backends.hpp"
#include "anosynth/backends/torch_backends.hpp"

namespace anosynth::backends {

inline constexpr int kSyntheticDim = 32;

/// Hashes the text into a seed and returns a unit-length Gaussian vector.
class SyntheticTextEncoder : public TextEncoder {
 public:
  explicit SyntheticTextEncoder(std::uint64_t seed, int dim = kSyntheticDim);
  std::string identity() const override;
  int embedding_dim() const override { return dim_; }
  Embedding embed_text(std::string_view text) const override;

 private:
  std::uint64_t seed_;
  int dim_;
};

/// Grayscale, bicubic resize to side x side, fixed random linear map.
class SyntheticImageEncoder : public ImageEncoder {
 public:
  explicit SyntheticImageEncoder(std::uint64_t seed, int dim = kSyntheticDim, int side = 16);
  std::string identity() const override;
  int embedding_dim() const override { return dim_; }
  const Preprocess& preprocess() const override { return preprocess_; }
  const torch::Tensor& weights() const { return weights_; }

 protected:
  torch::Tensor forward_preprocessed(const torch::Tensor& x) const override;

 private:
  std::uint64_t seed_;
  int dim_;
  Preprocess preprocess_;
  torch::Tensor weights_;  // [dim, side * side], float64
};

/// Two fixed random convolution stages (tanh activations) reported under the
/// configured content-layer names.
class SyntheticFeatureExtractor : public PerceptualFeatureExtractor {
 public:
  explicit SyntheticFeatureExtractor(std::uint64_t seed, int channels = 8);
  std::string identity() const override;
  std::vector<std::string> layers() const override { return {"conv4_2", "conv5_2"}; }
  std::vector<torch::Tensor> features(const torch::Tensor& x) const override;

 private:
  std::uint64_t seed_;
  torch::Tensor w1_, b1_, w2_, b2_;
};

/// Returns the input unchanged for every configured layer name.
class IdentityFeatureExtractor : public PerceptualFeatureExtractor {
 public:
  explicit IdentityFeatureExtractor(std::vector<std::string> layers = {"identity"})
      : layers_(std::move(layers)) {}
  std::string identity() const override { return "synthetic/identity_features"; }
  std::vector<std::string> layers() const override { return layers_; }
  std::vector<torch::Tensor> features(const torch::Tensor& x) const override {
    return std::vector<torch::Tensor>(layers_.size(), x);
  }

 private:
  std::vector<std::string> layers_;
};

/// Flood fill from the prompt points over pixels whose colour stays within
/// `tolerance` (Euclidean RGB) of the mean prompt colour, 4-connected.
class SyntheticSegmenter : public ForegroundSegmenter {
 public:
  explicit SyntheticSegmenter(double tolerance = 0.12) : tolerance_(tolerance) {}
  std::string identity() const override;
  mask::MaskCanvas segment(const Image& image, std::span<const PointPrompt> prompts) const override;

 private:
  double tolerance_;
};

/// Softmax over a fixed random linear map of an 8x8 grayscale thumbnail and
/// the per-channel means.
class SyntheticClassifier : public ClassifierBackend {
 public:
  explicit SyntheticClassifier(std::uint64_t seed, int classes = 10);
  std::string identity() const override;
  int num_classes() const override { return classes_; }
  std::vector<double> class_probabilities(const Image& image) const override;

 private:
  std::uint64_t seed_;
  int classes_;
  std::vector<double> weights_;  // classes x 67, row-major
};

/// Mean squared difference of channel-normalized synthetic features, summed
/// over both layers. Inputs are first resized to 64x64.
class SyntheticPerceptualDistance : public PerceptualDistanceBackend {
 public:
  explicit SyntheticPerceptualDistance(std::uint64_t seed) : features_(seed), seed_(seed) {}
  std::string identity() const override;
  double distance(const Image& a, const Image& b) const override;

 private:
  SyntheticFeatureExtractor features_;
  std::uint64_t seed_;
};

}  // namespace anosynth::backends
