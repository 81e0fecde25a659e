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

// Pretrained models exported to TorchScript by scripts/export_backends.py.
//
// A model directory holds one `meta.json` plus the module files it names:
//
//   {"model_id": "...", "text": {...}, "image": {...}, "features": {...},
//    "segmenter": {...}, "classifier": {...}, "distance": {...}}
//
// Each section carries a "file" entry and the preprocessing constants the
// module expects. Modules run in float32 and are loaded in eval mode with
// frozen parameters.

#include <torch/script.h>

#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "anosynth/backends/clip_tokenizer.hpp"
#include "anosynth/backends/image_backends.hpp"
#include "anosynth/backends/torch_backends.hpp"

namespace anosynth::backends {

/// A loaded TorchScript module plus the file hash used as its identity.
struct ScriptModule {
  std::shared_ptr<torch::jit::Module> module;
  std::string sha256;
  std::string name;

  static ScriptModule load(const std::filesystem::path& file, const std::string& name);
  torch::jit::IValue forward(std::vector<torch::jit::IValue> inputs) const;
};

/// Reads `<dir>/meta.json` and returns the named section, raising an
/// actionable BackendLoad error when the directory or section is missing.
nlohmann::json read_model_section(const std::filesystem::path& dir, const std::string& section);

class TorchScriptTextEncoder : public TextEncoder {
 public:
  explicit TorchScriptTextEncoder(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  int embedding_dim() const override { return dim_; }
  Embedding embed_text(std::string_view text) const override;
  std::vector<Embedding> embed_texts(const std::vector<std::string>& texts) const override;
  const ClipTokenizer& tokenizer() const { return *tokenizer_; }

 private:
  ScriptModule module_;
  std::unique_ptr<ClipTokenizer> tokenizer_;
  std::string vocab_sha256_;
  int dim_ = 0;
};

class TorchScriptImageEncoder : public ImageEncoder {
 public:
  explicit TorchScriptImageEncoder(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  int embedding_dim() const override { return dim_; }
  const Preprocess& preprocess() const override { return preprocess_; }

 protected:
  torch::Tensor forward_preprocessed(const torch::Tensor& x) const override;

 private:
  ScriptModule module_;
  Preprocess preprocess_;
  int dim_ = 0;
};

class TorchScriptFeatureExtractor : public PerceptualFeatureExtractor {
 public:
  explicit TorchScriptFeatureExtractor(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  std::vector<std::string> layers() const override { return layers_; }
  std::vector<torch::Tensor> features(const torch::Tensor& x) const override;

 private:
  ScriptModule module_;
  std::vector<std::string> layers_;
  Preprocess normalize_;
};

/// Point-prompted segmenter: longest side resized to the encoder resolution,
/// normalized, zero padded; low-resolution logits are upsampled back to the
/// input size and thresholded.
class TorchScriptSegmenter : public ForegroundSegmenter {
 public:
  explicit TorchScriptSegmenter(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  mask::MaskCanvas segment(const Image& image, std::span<const PointPrompt> prompts) const override;

 private:
  ScriptModule module_;
  int input_size_ = 1024;
  std::array<double, 3> pixel_mean_{};
  std::array<double, 3> pixel_std_{};
  double threshold_ = 0.0;
};

class TorchScriptClassifier : public ClassifierBackend {
 public:
  explicit TorchScriptClassifier(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  int num_classes() const override { return classes_; }
  std::vector<double> class_probabilities(const Image& image) const override;

 private:
  ScriptModule module_;
  Preprocess preprocess_;
  int classes_ = 0;
};

class TorchScriptPerceptualDistance : public PerceptualDistanceBackend {
 public:
  explicit TorchScriptPerceptualDistance(const std::filesystem::path& dir);
  std::string identity() const override;
  Sharing sharing() const override { return Sharing::Exclusive; }
  double distance(const Image& a, const Image& b) const override;

 private:
  ScriptModule module_;
  int input_size_ = 256;
};

}  // namespace anosynth::backends
