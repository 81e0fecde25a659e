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


#include "anosynth/pipeline/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "anosynth/core/error.hpp"
#include "builtin_datasets.hpp"

namespace anosynth::pipeline {
namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

}  // namespace

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_image_file(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

const CategoryDescriptor* DatasetDescriptor::find(std::string_view category) const {
  for (const auto& c : categories) {
    if (c.name == category) return &c;
  }
  return nullptr;
}

DatasetDescriptor DatasetDescriptor::parse(const nlohmann::json& j) {
  DatasetDescriptor d;
  try {
    d.name = j.at("name").get<std::string>();
    d.version = j.value("version", 1);
    for (const auto& c : j.at("categories")) {
      CategoryDescriptor cd;
      cd.name = c.at("name").get<std::string>();
      cd.type = mask::category_type_from_string(c.at("type").get<std::string>());
      cd.defects = c.at("defects").get<std::vector<std::string>>();
      cd.train_normal = c.value("train_normal", 0);
      cd.test_normal = c.value("test_normal", 0);
      cd.test_anomaly = c.value("test_anomaly", 0);
      require(!cd.defects.empty(), ErrorCode::InvalidArgument, "category " + cd.name + " lists no defects");
      d.categories.push_back(std::move(cd));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed dataset descriptor: ") + e.what());
  }
  return d;
}

const DatasetDescriptor& DatasetDescriptor::builtin(std::string_view name) {
  static const DatasetDescriptor mvtec = parse(nlohmann::json::parse(kBuiltinMvtecAd));
  static const DatasetDescriptor visa = parse(nlohmann::json::parse(kBuiltinVisa));
  if (name == "mvtec_ad" || name == "mvtec") return mvtec;
  if (name == "visa") return visa;
  fail(ErrorCode::InvalidArgument, "unknown dataset descriptor '" + std::string(name) + "' (mvtec_ad, visa)");
}

DatasetDescriptor DatasetDescriptor::resolve(const std::string& name_or_path) {
  if (name_or_path == "mvtec_ad" || name_or_path == "mvtec" || name_or_path == "visa") return builtin(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) fail(ErrorCode::Io, "cannot open dataset descriptor " + name_or_path);
  try {
    return parse(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, "malformed dataset descriptor " + name_or_path + ": " + e.what());
  }
}

nlohmann::json to_json(const DatasetDescriptor& d) {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : d.categories) {
    cats.push_back({{"name", c.name},
                    {"type", mask::to_string(c.type)},
                    {"defects", c.defects},
                    {"train_normal", c.train_normal},
                    {"test_normal", c.test_normal},
                    {"test_anomaly", c.test_anomaly}});
  }
  return {{"name", d.name}, {"version", d.version}, {"categories", cats}};
}

nlohmann::json to_json(const DatasetIndex& index) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [name, c] : index.categories) {
    nlohmann::json normals = nlohmann::json::array();
    for (const auto& p : c.normals) normals.push_back(fs::relative(p, index.root).generic_string());
    cats[name] = {{"type", mask::to_string(c.type)}, {"defects", c.defects}, {"normals", normals}};
  }
  return {{"root", index.root.generic_string()}, {"descriptor", index.descriptor}, {"categories", cats}};
}

DatasetIndex index_dataset(const fs::path& root, const DatasetDescriptor& descriptor,
                           const std::vector<std::string>& only) {
  require(fs::is_directory(root), ErrorCode::Dataset, "dataset root " + root.string() + " is not a directory");
  for (const auto& name : only) {
    require(descriptor.find(name) != nullptr, ErrorCode::Dataset,
            "category '" + name + "' is not in descriptor " + descriptor.name);
  }
  DatasetIndex index;
  index.root = fs::absolute(root).lexically_normal();
  index.descriptor = descriptor.name;
  for (const auto& c : descriptor.categories) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const fs::path dir = index.root / c.name;
    require(fs::is_directory(dir), ErrorCode::Dataset, "missing category directory " + dir.string());
    auto normals = list_images(dir / "train" / "good");
    if (normals.empty()) normals = list_images(dir / "Data" / "Images" / "Normal");
    require(!normals.empty(), ErrorCode::Dataset,
            "no normal training images under " + (dir / "train" / "good").string());
    index.categories[c.name] = {c.name, c.type, c.defects, std::move(normals)};
  }
  return index;
}

std::vector<TestItem> index_test_split(const fs::path& root, const std::string& category) {
  const fs::path test = root / category / "test";
  require(fs::is_directory(test), ErrorCode::Dataset, "missing test directory " + test.string());
  std::vector<fs::path> groups;
  for (const auto& e : fs::directory_iterator(test)) {
    if (e.is_directory()) groups.push_back(e.path());
  }
  std::sort(groups.begin(), groups.end());
  std::vector<TestItem> items;
  for (const auto& g : groups) {
    const std::string defect = g.filename().string();
    for (const auto& img : list_images(g)) {
      TestItem item{img, std::nullopt, defect};
      if (defect != "good") {
        const fs::path m = root / category / "ground_truth" / defect / (img.stem().string() + "_mask.png");
        require(fs::exists(m), ErrorCode::Dataset, "missing ground-truth mask " + m.string());
        item.mask = m;
      }
      items.push_back(std::move(item));
    }
  }
  require(!items.empty(), ErrorCode::Dataset, "no test images under " + test.string());
  return items;
}

}  // namespace anosynth::pipeline
