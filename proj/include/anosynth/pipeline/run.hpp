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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "anosynth/backends/registry.hpp"
#include "anosynth/mask/anomaly_mask.hpp"
#include "anosynth/pipeline/dataset.hpp"
#include "anosynth/prompt/prompts.hpp"
#include "anosynth/stylizer/losses.hpp"

namespace anosynth::pipeline {

inline constexpr const char* kManifestSchema = "anosynth.manifest/1";
inline constexpr const char* kSummarySchema = "anosynth.run_summary/1";

struct RunConfig {
  std::filesystem::path dataset_root;
  std::string descriptor = "mvtec_ad";
  std::vector<std::string> categories;  // empty: every descriptor category
  backends::BackendConfigs backends = backends::synthetic_backend_configs(0);
  mask::CompositeParams composite;
  stylizer::TrainHyperparams hyperparams;
  std::string templates;  // template file; empty for the builtin set
  int count_per_category = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output;
  int workers = 1;

  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown top-level keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json backend_configs_to_json(const backends::BackendConfigs& c);
/// Kinds not present in `j` keep their entry in `base`.
backends::BackendConfigs backend_configs_from_json(const nlohmann::json& j, backends::BackendConfigs base);

struct StylizationJob {
  std::string id;
  std::string category;
  std::string defect;  // label as listed by the dataset descriptor
  mask::CategoryType type = mask::CategoryType::Object;
  std::filesystem::path source;
  int ordinal = 0;
  std::uint64_t seed = 0;

  prompt::CategoryDefectPair pair() const { return prompt::CategoryDefectPair::from_labels(category, defect); }
  /// `<category>/<defect>/<id>` without extension, relative to the output root.
  std::filesystem::path stem() const;
};

/// Seed of job `ordinal` in `category`; depends on nothing else.
std::uint64_t job_seed(std::uint64_t master, std::string_view category, int ordinal);

/// Normals cycled in sorted order; defect uniform over the category's list.
std::vector<StylizationJob> plan_jobs(const DatasetIndex& index, const RunConfig& cfg);

struct JobOutcome {
  std::string id;
  bool ok = false;
  std::string error;
  int retries = 0;
  std::string image_sha256;
};

struct RunSummary {
  int total = 0;
  int succeeded = 0;
  int failed = 0;
  long retries = 0;
  double wall_seconds = 0.0;
  std::vector<JobOutcome> jobs;
};

/// Wall time is left out so the file is reproducible.
nlohmann::json to_json(const RunSummary& s);

using LogFn = std::function<void(const std::string&)>;

/// Runs the given jobs and writes their artifacts under cfg.output. Backend
/// load failures throw; per-job failures are recorded in the summary.
RunSummary execute_jobs(const std::vector<StylizationJob>& jobs, const RunConfig& cfg, const LogFn& log = {});

/// index_dataset + plan_jobs + execute_jobs, plus run_config.json and
/// run_summary.json in the output root.
RunSummary execute_run(const RunConfig& cfg, const LogFn& log = {});

struct ReplayResult {
  bool image_matches = false;
  bool backends_match = false;
  std::string expected_sha256;
  std::string actual_sha256;
  std::filesystem::path image;
};

/// Re-executes the job recorded in a manifest into `out_root` and compares
/// the regenerated image hash to the recorded one.
ReplayResult replay(const std::filesystem::path& manifest, const std::filesystem::path& out_root,
                    const LogFn& log = {});

}  // namespace anosynth::pipeline
