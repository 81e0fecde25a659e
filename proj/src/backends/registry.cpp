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

#include "anosynth/backends/registry.hpp"

#include <array>
#include <cstdlib>

#include "anosynth/backends/synthetic.hpp"
#include "anosynth/backends/torchscript.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/rng.hpp"

namespace anosynth::backends {
namespace {

constexpr std::array<std::pair<BackendKind, const char*>, 6> kKindNames = {{
    {BackendKind::TextEncoder, "text_encoder"},
    {BackendKind::ImageEncoder, "image_encoder"},
    {BackendKind::FeatureExtractor, "feature_extractor"},
    {BackendKind::Segmenter, "segmenter"},
    {BackendKind::Classifier, "classifier"},
    {BackendKind::PerceptualDistance, "perceptual_distance"},
}};

std::shared_ptr<Backend> load_synthetic(const BackendConfig& c) {
  switch (c.kind) {
    case BackendKind::TextEncoder:
      return std::make_shared<SyntheticTextEncoder>(c.seed);
    case BackendKind::ImageEncoder:
      return std::make_shared<SyntheticImageEncoder>(c.seed);
    case BackendKind::FeatureExtractor:
      if (c.model_id == "identity") return std::make_shared<IdentityFeatureExtractor>();
      return std::make_shared<SyntheticFeatureExtractor>(c.seed);
    case BackendKind::Segmenter:
      return std::make_shared<SyntheticSegmenter>();
    case BackendKind::Classifier:
      return std::make_shared<SyntheticClassifier>(c.seed);
    case BackendKind::PerceptualDistance:
      return std::make_shared<SyntheticPerceptualDistance>(c.seed);
  }
  fail(ErrorCode::InvalidArgument, "unknown backend kind");
}

std::shared_ptr<Backend> load_real(const BackendConfig& c) {
  const std::string id = c.model_id.empty() ? BackendConfig::default_model_id(c.kind) : c.model_id;
  const auto dir = resolve_model_root(c) / id;
  switch (c.kind) {
    case BackendKind::TextEncoder:
      return std::make_shared<TorchScriptTextEncoder>(dir);
    case BackendKind::ImageEncoder:
      return std::make_shared<TorchScriptImageEncoder>(dir);
    case BackendKind::FeatureExtractor:
      return std::make_shared<TorchScriptFeatureExtractor>(dir);
    case BackendKind::Segmenter:
      return std::make_shared<TorchScriptSegmenter>(dir);
    case BackendKind::Classifier:
      return std::make_shared<TorchScriptClassifier>(dir);
    case BackendKind::PerceptualDistance:
      return std::make_shared<TorchScriptPerceptualDistance>(dir);
  }
  fail(ErrorCode::InvalidArgument, "unknown backend kind");
}

template <class T>
std::shared_ptr<T> load_as(const BackendConfigs& configs, BackendKind kind) {
  const auto it = configs.find(kind);
  if (it == configs.end()) return nullptr;
  auto typed = std::dynamic_pointer_cast<T>(load_backend(it->second));
  require(typed != nullptr, ErrorCode::BackendLoad, "backend does not implement " + to_string(kind));
  return typed;
}

}  // namespace

std::string to_string(BackendKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

BackendKind backend_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  fail(ErrorCode::InvalidArgument, "unknown backend kind '" + name + "'");
}

std::string BackendConfig::default_model_id(BackendKind kind) {
  switch (kind) {
    case BackendKind::TextEncoder:
    case BackendKind::ImageEncoder:
      return "clip-vit-b-32";
    case BackendKind::FeatureExtractor:
      return "vgg19";
    case BackendKind::Segmenter:
      return "sam-vit-b";
    case BackendKind::Classifier:
      return "inception-v3";
    case BackendKind::PerceptualDistance:
      return "lpips-alex";
  }
  return "";
}

void to_json(nlohmann::json& j, const BackendConfig& c) {
  j = {{"kind", to_string(c.kind)}, {"impl", c.impl}, {"seed", c.seed}};
  if (!c.model_id.empty()) j["model_id"] = c.model_id;
  if (!c.model_dir.empty()) j["model_dir"] = c.model_dir;
}

void from_json(const nlohmann::json& j, BackendConfig& c) {
  c.kind = backend_kind_from_string(j.at("kind").get<std::string>());
  c.impl = j.value("impl", std::string("synthetic"));
  c.model_id = j.value("model_id", std::string());
  c.seed = j.value("seed", std::uint64_t{0});
  c.model_dir = j.value("model_dir", std::string());
  require(c.impl == "synthetic" || c.impl == "real", ErrorCode::InvalidArgument,
          "backend impl must be 'synthetic' or 'real', got '" + c.impl + "'");
}

std::filesystem::path resolve_model_root(const BackendConfig& config) {
  if (const char* env = std::getenv(kModelDirEnv); env != nullptr && *env != '\0') return env;
  if (!config.model_dir.empty()) return config.model_dir;
  if (const char* home = std::getenv("HOME"); home != nullptr) {
    return std::filesystem::path(home) / ".cache" / "anosynth" / "models";
  }
  return std::filesystem::path(".anosynth-models");
}

std::shared_ptr<Backend> load_backend(const BackendConfig& config) {
  if (config.impl == "synthetic") return load_synthetic(config);
  if (config.impl == "real") return load_real(config);
  fail(ErrorCode::InvalidArgument, "backend impl must be 'synthetic' or 'real', got '" + config.impl + "'");
}

bool BackendSet::shareable() const {
  const std::array<const Backend*, 6> all = {text.get(), image.get(), features.get(),
                                             segmenter.get(), classifier.get(), distance.get()};
  for (const Backend* b : all)
    if (b != nullptr && b->sharing() == Sharing::Exclusive) return false;
  return true;
}

void BackendSet::validate() const {
  if (text && image) {
    require(text->embedding_dim() == image->embedding_dim(), ErrorCode::DimensionMismatch,
            "text encoder dimension " + std::to_string(text->embedding_dim()) +
                " differs from image encoder dimension " + std::to_string(image->embedding_dim()));
  }
}

nlohmann::json BackendSet::identities() const {
  nlohmann::json j = nlohmann::json::object();
  const auto put = [&](BackendKind k, const Backend* b) {
    if (b != nullptr) j[to_string(k)] = b->identity();
  };
  put(BackendKind::TextEncoder, text.get());
  put(BackendKind::ImageEncoder, image.get());
  put(BackendKind::FeatureExtractor, features.get());
  put(BackendKind::Segmenter, segmenter.get());
  put(BackendKind::Classifier, classifier.get());
  put(BackendKind::PerceptualDistance, distance.get());
  return j;
}

BackendConfigs synthetic_backend_configs(std::uint64_t seed) {
  BackendConfigs configs;
  for (const auto& [kind, name] : kKindNames) {
    BackendConfig c;
    c.kind = kind;
    c.impl = "synthetic";
    c.seed = derive_seed(seed, name);
    configs[kind] = c;
  }
  return configs;
}

BackendSet load_backend_set(const BackendConfigs& configs) {
  BackendSet set;
  set.text = load_as<TextEncoder>(configs, BackendKind::TextEncoder);
  set.image = load_as<ImageEncoder>(configs, BackendKind::ImageEncoder);
  set.features = load_as<PerceptualFeatureExtractor>(configs, BackendKind::FeatureExtractor);
  set.segmenter = load_as<ForegroundSegmenter>(configs, BackendKind::Segmenter);
  set.classifier = load_as<ClassifierBackend>(configs, BackendKind::Classifier);
  set.distance = load_as<PerceptualDistanceBackend>(configs, BackendKind::PerceptualDistance);
  set.validate();
  return set;
}

}  // namespace anosynth::backends
