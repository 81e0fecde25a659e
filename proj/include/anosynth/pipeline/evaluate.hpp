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
#include <set>
#include <string>
#include <vector>

#include "anosynth/backends/registry.hpp"
#include "anosynth/eval/detector.hpp"
#include "anosynth/eval/metrics.hpp"
#include "anosynth/pipeline/run.hpp"

namespace anosynth::pipeline {

struct GeneratedItem {
  std::string category;
  std::string defect;
  std::filesystem::path image;
  std::filesystem::path mask;
  std::filesystem::path manifest;
};

/// Every `*.manifest.json` under `gen_dir`, sorted by path.
std::vector<GeneratedItem> scan_generated(const std::filesystem::path& gen_dir);

struct EvaluateOptions {
  std::filesystem::path gen_dir;
  std::filesystem::path dataset_dir;  // needed for detection only
  std::set<std::string> metrics{"is", "icl", "detection"};
  backends::BackendConfigs backends = backends::synthetic_backend_configs(0);
  eval::DetectionConfig detection;
  std::uint64_t seed = 0;
};

/// IS and IC-L per category (IC-L cluster = category) averaged over
/// categories; detection trains one detector per category on generated
/// anomalies plus the dataset's training normals and scores its test split.
eval::MetricsReport evaluate_generated(const EvaluateOptions& options, const LogFn& log = {});

}  // namespace anosynth::pipeline
