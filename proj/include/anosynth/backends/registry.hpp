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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "anosynth/backends/image_backends.hpp"
#include "anosynth/backends/torch_backends.hpp"

namespace anosynth::backends {

enum class BackendKind { TextEncoder, ImageEncoder, FeatureExtractor, Segmenter, Classifier, PerceptualDistance };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& name);

/// Environment variable naming the model cache root.
inline constexpr const char* kModelDirEnv = "ANOSYNTH_MODEL_DIR";

/// One backend block of the run config: {kind, impl, model_id?, seed?}.
struct BackendConfig {
  BackendKind kind = BackendKind::TextEncoder;
  std::string impl = "synthetic";  // "synthetic" or "real"
  std::string model_id;            // real: directory under the model root; synthetic: variant
  std::uint64_t seed = 0;
  std::string model_dir;           // optional root; the environment variable wins

  /// Model id used for `real` when none is configured.
  static std::string default_model_id(BackendKind kind);
};

void to_json(nlohmann::json& j, const BackendConfig& c);
void from_json(const nlohmann::json& j, BackendConfig& c);

/// Environment variable, then the configured root, then ~/.cache/anosynth/models.
std::filesystem::path resolve_model_root(const BackendConfig& config);

std::shared_ptr<Backend> load_backend(const BackendConfig& config);

struct BackendSet {
  std::shared_ptr<TextEncoder> text;
  std::shared_ptr<ImageEncoder> image;
  std::shared_ptr<PerceptualFeatureExtractor> features;
  std::shared_ptr<ForegroundSegmenter> segmenter;
  std::shared_ptr<ClassifierBackend> classifier;
  std::shared_ptr<PerceptualDistanceBackend> distance;

  /// True when every loaded member may be shared across threads.
  bool shareable() const;
  /// Raises DimensionMismatch when text and image encoders disagree.
  void validate() const;
  /// kind name -> identity, for manifests.
  nlohmann::json identities() const;
};

using BackendConfigs = std::map<BackendKind, BackendConfig>;

/// Synthetic configs for every kind, with per-kind seeds derived from `seed`.
BackendConfigs synthetic_backend_configs(std::uint64_t seed);

/// Loads every configured kind; kinds without a config stay null. Raises
/// DimensionMismatch when the text and image encoders disagree.
BackendSet load_backend_set(const BackendConfigs& configs);

}  // namespace anosynth::backends
