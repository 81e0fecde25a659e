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

#include "anosynth/backends/torchscript.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"

namespace anosynth::backends {
namespace {

namespace F = torch::nn::functional;

constexpr const char* kExportHint =
    "Export the models with `python3 scripts/export_backends.py --out <model dir>` "
    "(pretrained weights are fetched by the script) and point ANOSYNTH_MODEL_DIR at that directory.";

std::array<double, 3> triple(const nlohmann::json& j, const char* key, std::array<double, 3> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  require(v.size() == 3, ErrorCode::BackendLoad, std::string("meta.json field ") + key + " needs 3 values");
  return {v[0], v[1], v[2]};
}

Preprocess read_preprocess(const nlohmann::json& section, int default_size) {
  Preprocess p;
  p.input_size = section.value("input_size", default_size);
  p.mean = triple(section, "mean", p.mean);
  p.std = triple(section, "std", p.std);
  return p;
}

std::filesystem::path section_file(const std::filesystem::path& dir, const nlohmann::json& section,
                                   const char* fallback) {
  return dir / section.value("file", std::string(fallback));
}

}  // namespace

ScriptModule ScriptModule::load(const std::filesystem::path& file, const std::string& name) {
  if (!std::filesystem::exists(file)) {
    fail(ErrorCode::BackendLoad, "model file " + file.string() + " is missing. " + kExportHint);
  }
  ScriptModule m;
  m.name = name;
  try {
    m.module = std::make_shared<torch::jit::Module>(torch::jit::load(file.string(), torch::kCPU));
  } catch (const c10::Error& e) {
    fail(ErrorCode::BackendLoad, "cannot load TorchScript module " + file.string() + ": " + e.what_without_backtrace());
  }
  m.module->eval();
  for (auto p : m.module->parameters()) p.requires_grad_(false);
  m.sha256 = sha256_file(file);
  return m;
}

torch::jit::IValue ScriptModule::forward(std::vector<torch::jit::IValue> inputs) const {
  try {
    return module->forward(std::move(inputs));
  } catch (const c10::Error& e) {
    fail(ErrorCode::Backend, name + " forward failed: " + e.what_without_backtrace());
  }
}

nlohmann::json read_model_section(const std::filesystem::path& dir, const std::string& section) {
  const auto meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  if (!in) fail(ErrorCode::BackendLoad, "no model found at " + dir.string() + " (missing meta.json). " + kExportHint);
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BackendLoad, "malformed " + meta_path.string() + ": " + e.what());
  }
  if (!meta.contains(section)) {
    fail(ErrorCode::BackendLoad, meta_path.string() + " has no '" + section + "' section. " + kExportHint);
  }
  return meta.at(section);
}

// Text.

TorchScriptTextEncoder::TorchScriptTextEncoder(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "text");
  module_ = ScriptModule::load(section_file(dir, s, "text_encoder.pt"), "text_encoder");
  const auto vocab = dir / s.value("vocab", std::string("bpe_simple_vocab_16e6.txt.gz"));
  if (!std::filesystem::exists(vocab)) fail(ErrorCode::BackendLoad, "tokenizer vocabulary " + vocab.string() + " is missing. " + kExportHint);
  tokenizer_ = std::make_unique<ClipTokenizer>(ClipTokenizer::from_file(vocab, s.value("context_length", 77)));
  vocab_sha256_ = sha256_file(vocab);
  dim_ = s.at("embedding_dim").get<int>();
}

std::string TorchScriptTextEncoder::identity() const {
  return "torchscript/" + module_.name + "/sha256=" + module_.sha256 + "/vocab_sha256=" + vocab_sha256_;
}

Embedding TorchScriptTextEncoder::embed_text(std::string_view text) const {
  return embed_texts({std::string(text)}).front();
}

std::vector<Embedding> TorchScriptTextEncoder::embed_texts(const std::vector<std::string>& texts) const {
  torch::NoGradGuard no_grad;
  std::vector<Embedding> out;
  // One prompt per forward pass so a text's embedding never depends on what
  // it was batched with.
  constexpr std::size_t kBatch = 1;
  for (std::size_t start = 0; start < texts.size(); start += kBatch) {
    const std::size_t n = std::min(kBatch, texts.size() - start);
    const int ctx = tokenizer_->context_length();
    torch::Tensor ids = torch::zeros({static_cast<int64_t>(n), ctx}, torch::kInt64);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = tokenizer_->tokenize(texts[start + i]);
      std::memcpy(ids[i].data_ptr<int64_t>(), row.data(), row.size() * sizeof(int64_t));
    }
    const torch::Tensor emb = unit_rows(module_.forward({ids}).toTensor().to(torch::kFloat64));
    require(emb.dim() == 2 && emb.size(1) == dim_, ErrorCode::Backend, "text encoder returned an unexpected shape");
    for (int64_t i = 0; i < emb.size(0); ++i) out.push_back(tensor_to_embedding(emb[i]));
  }
  return out;
}

// Image.

TorchScriptImageEncoder::TorchScriptImageEncoder(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "image");
  module_ = ScriptModule::load(section_file(dir, s, "image_encoder.pt"), "image_encoder");
  preprocess_ = read_preprocess(s, 224);
  dim_ = s.at("embedding_dim").get<int>();
}

std::string TorchScriptImageEncoder::identity() const { return "torchscript/" + module_.name + "/sha256=" + module_.sha256; }

torch::Tensor TorchScriptImageEncoder::forward_preprocessed(const torch::Tensor& x) const {
  return module_.forward({x.to(torch::kFloat32)}).toTensor().to(x.dtype());
}

// Features.

TorchScriptFeatureExtractor::TorchScriptFeatureExtractor(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "features");
  module_ = ScriptModule::load(section_file(dir, s, "features.pt"), "features");
  layers_ = s.at("layers").get<std::vector<std::string>>();
  normalize_ = read_preprocess(s, 0);
}

std::string TorchScriptFeatureExtractor::identity() const { return "torchscript/" + module_.name + "/sha256=" + module_.sha256; }

std::vector<torch::Tensor> TorchScriptFeatureExtractor::features(const torch::Tensor& x) const {
  const auto opts = torch::TensorOptions().dtype(torch::kFloat32);
  const auto mean = torch::tensor({normalize_.mean[0], normalize_.mean[1], normalize_.mean[2]}, opts).view({1, 3, 1, 1});
  const auto std = torch::tensor({normalize_.std[0], normalize_.std[1], normalize_.std[2]}, opts).view({1, 3, 1, 1});
  const auto out = module_.forward({(x.to(torch::kFloat32) - mean) / std});
  std::vector<torch::Tensor> maps;
  for (const auto& v : out.toTuple()->elements()) maps.push_back(v.toTensor().to(x.dtype()));
  require(maps.size() == layers_.size(), ErrorCode::Backend, "feature extractor returned the wrong number of layers");
  return maps;
}

// Segmenter.

TorchScriptSegmenter::TorchScriptSegmenter(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "segmenter");
  module_ = ScriptModule::load(section_file(dir, s, "segmenter.pt"), "segmenter");
  input_size_ = s.value("input_size", 1024);
  pixel_mean_ = triple(s, "pixel_mean", {123.675, 116.28, 103.53});
  pixel_std_ = triple(s, "pixel_std", {58.395, 57.12, 57.375});
  threshold_ = s.value("mask_threshold", 0.0);
}

std::string TorchScriptSegmenter::identity() const { return "torchscript/" + module_.name + "/sha256=" + module_.sha256; }

mask::MaskCanvas TorchScriptSegmenter::segment(const Image& image, std::span<const PointPrompt> prompts) const {
  torch::NoGradGuard no_grad;
  require(!prompts.empty(), ErrorCode::InvalidArgument, "segmenter needs at least one prompt");
  const int h = image.height, w = image.width;
  const double scale = double(input_size_) / std::max(h, w);
  const int nh = static_cast<int>(h * scale + 0.5), nw = static_cast<int>(w * scale + 0.5);

  torch::Tensor x = image_to_tensor(image) * 255.0;
  x = F::interpolate(x, F::InterpolateFuncOptions().size(std::vector<int64_t>{nh, nw}).mode(torch::kBilinear).align_corners(false));
  const auto mean = torch::tensor({pixel_mean_[0], pixel_mean_[1], pixel_mean_[2]}).to(torch::kFloat32).view({1, 3, 1, 1});
  const auto std = torch::tensor({pixel_std_[0], pixel_std_[1], pixel_std_[2]}).to(torch::kFloat32).view({1, 3, 1, 1});
  x = F::pad((x - mean) / std, F::PadFuncOptions({0, input_size_ - nw, 0, input_size_ - nh}));

  const auto n = static_cast<int64_t>(prompts.size());
  torch::Tensor coords = torch::zeros({1, n, 2});
  torch::Tensor labels = torch::zeros({1, n}, torch::kInt64);
  for (int64_t i = 0; i < n; ++i) {
    coords[0][i][0] = prompts[i].x * (double(nw) / w);
    coords[0][i][1] = prompts[i].y * (double(nh) / h);
    labels[0][i] = prompts[i].positive ? 1 : 0;
  }
  torch::Tensor logits = module_.forward({x, coords, labels}).toTensor();
  require(logits.dim() == 4, ErrorCode::Backend, "segmenter returned an unexpected shape");
  logits = logits.index({torch::indexing::Slice(0, 1), torch::indexing::Slice(0, 1)});
  const auto bilinear = [](const torch::Tensor& t, int64_t oh, int64_t ow) {
    return F::interpolate(t, F::InterpolateFuncOptions().size(std::vector<int64_t>{oh, ow}).mode(torch::kBilinear).align_corners(false));
  };
  logits = bilinear(logits, input_size_, input_size_);
  logits = logits.index({torch::indexing::Slice(), torch::indexing::Slice(), torch::indexing::Slice(0, nh),
                         torch::indexing::Slice(0, nw)});
  logits = bilinear(logits, h, w).contiguous();

  mask::MaskCanvas out(w, h);
  const float* p = logits.data_ptr<float>();
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) out.set(xx, y, p[y * w + xx] > threshold_);
  return out;
}

// Classifier.

TorchScriptClassifier::TorchScriptClassifier(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "classifier");
  module_ = ScriptModule::load(section_file(dir, s, "classifier.pt"), "classifier");
  preprocess_ = read_preprocess(s, 299);
  classes_ = s.at("num_classes").get<int>();
}

std::string TorchScriptClassifier::identity() const { return "torchscript/" + module_.name + "/sha256=" + module_.sha256; }

std::vector<double> TorchScriptClassifier::class_probabilities(const Image& image) const {
  torch::NoGradGuard no_grad;
  const torch::Tensor x = preprocess_for_encoder(image_to_tensor(image), preprocess_);
  const torch::Tensor logits = module_.forward({x}).toTensor().to(torch::kFloat64);
  require(logits.numel() == classes_, ErrorCode::Backend, "classifier returned an unexpected shape");
  return tensor_to_embedding(torch::softmax(logits.reshape({-1}), 0));
}

// Perceptual distance.

TorchScriptPerceptualDistance::TorchScriptPerceptualDistance(const std::filesystem::path& dir) {
  const auto s = read_model_section(dir, "distance");
  module_ = ScriptModule::load(section_file(dir, s, "distance.pt"), "distance");
  input_size_ = s.value("input_size", 256);
}

std::string TorchScriptPerceptualDistance::identity() const { return "torchscript/" + module_.name + "/sha256=" + module_.sha256; }

double TorchScriptPerceptualDistance::distance(const Image& a, const Image& b) const {
  torch::NoGradGuard no_grad;
  const auto prep = [&](const Image& im) { return image_to_tensor(resize_bicubic(im, input_size_, input_size_)); };
  const double d = module_.forward({prep(a), prep(b)}).toTensor().sum().item<double>();
  return std::max(0.0, d);
}

}  // namespace anosynth::backends
