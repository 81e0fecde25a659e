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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anosynth/mask/anomaly_mask.hpp"

namespace anosynth::pipeline {

struct CategoryDescriptor {
  std::string name;
  mask::CategoryType type = mask::CategoryType::Object;
  std::vector<std::string> defects;
  int train_normal = 0;
  int test_normal = 0;
  int test_anomaly = 0;
};

struct DatasetDescriptor {
  std::string name;
  int version = 0;
  std::vector<CategoryDescriptor> categories;

  const CategoryDescriptor* find(std::string_view category) const;

  /// "mvtec_ad" or "visa", compiled in from data/datasets.
  static const DatasetDescriptor& builtin(std::string_view name);
  static DatasetDescriptor parse(const nlohmann::json& j);
  /// A builtin name or a path to a descriptor JSON file.
  static DatasetDescriptor resolve(const std::string& name_or_path);
};

nlohmann::json to_json(const DatasetDescriptor& d);

struct CategoryIndex {
  std::string name;
  mask::CategoryType type = mask::CategoryType::Object;
  std::vector<std::string> defects;
  std::vector<std::filesystem::path> normals;  // sorted
};

struct DatasetIndex {
  std::filesystem::path root;
  std::string descriptor;
  std::map<std::string, CategoryIndex> categories;

  bool empty() const { return categories.empty(); }
};

nlohmann::json to_json(const DatasetIndex& index);

/// Scans `<root>/<category>/train/good` (or VisA's `Data/Images/Normal`).
/// With an empty `only` every descriptor category must be present.
DatasetIndex index_dataset(const std::filesystem::path& root, const DatasetDescriptor& descriptor,
                           const std::vector<std::string>& only = {});

struct TestItem {
  std::filesystem::path image;
  std::optional<std::filesystem::path> mask;  // absent for normal test images
  std::string defect;                         // "good" for normals
};

/// `<root>/<category>/test/<defect>/*` with masks from
/// `ground_truth/<defect>/<stem>_mask.png`.
std::vector<TestItem> index_test_split(const std::filesystem::path& root, const std::string& category);

/// Sorted image files (png, jpg, jpeg, bmp; any case) directly in `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace anosynth::pipeline
