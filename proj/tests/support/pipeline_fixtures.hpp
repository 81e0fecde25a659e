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


// Small on-disk datasets and run configs for pipeline tests.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anosynth/core/image.hpp"
#include "anosynth/core/rng.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/pipeline/run.hpp"

namespace anosynth::testing {

/// Noisy background with a dark centred square, so the synthetic segmenter
/// finds a foreground.
inline Image toy_product(int side, std::uint64_t seed) {
  Rng rng(seed);
  Image img(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const bool inside = x >= side / 4 && x < 3 * side / 4 && y >= side / 4 && y < 3 * side / 4;
      for (int c = 0; c < 3; ++c) {
        const double v = inside ? 0.15 + 0.05 * rng.uniform() : 0.5 + 0.3 * rng.uniform();
        img.at(x, y, c) = static_cast<float>(v);
      }
    }
  }
  return quantize_8bit(img);
}

/// MVTec-style tree: <cat>/train/good, <cat>/test/{good,<defect>},
/// <cat>/ground_truth/<defect>.
inline void write_toy_dataset(const std::filesystem::path& root, const std::vector<std::string>& categories,
                              int normals, int side, std::uint64_t seed = 1) {
  namespace fs = std::filesystem;
  int k = 0;
  for (const auto& cat : categories) {
    fs::create_directories(root / cat / "train" / "good");
    for (int i = 0; i < normals; ++i) {
      char name[16];
      std::snprintf(name, sizeof(name), "%03d.png", i);
      save_png(root / cat / "train" / "good" / name, toy_product(side, seed * 1000 + k++));
    }
    fs::create_directories(root / cat / "test" / "good");
    fs::create_directories(root / cat / "test" / "crack");
    fs::create_directories(root / cat / "ground_truth" / "crack");
    save_png(root / cat / "test" / "good" / "000.png", toy_product(side, seed * 1000 + k++));
    save_png(root / cat / "test" / "crack" / "000.png", toy_product(side, seed * 1000 + k++));
    mask::MaskCanvas m(side, side);
    for (int y = side / 3; y < side / 2; ++y)
      for (int x = side / 3; x < side / 2; ++x) m.set(x, y, 1);
    mask::save_mask_png(root / cat / "ground_truth" / "crack" / "000_mask.png", m);
  }
}

/// A run config sized for 64 px images and a few iterations.
inline pipeline::RunConfig small_run_config(const std::filesystem::path& dataset, const std::filesystem::path& out,
                                            std::vector<std::string> categories, int count, std::uint64_t seed) {
  pipeline::RunConfig cfg;
  cfg.dataset_root = dataset;
  cfg.categories = std::move(categories);
  cfg.count_per_category = count;
  cfg.seed = seed;
  cfg.output = out;
  cfg.hyperparams.iterations = 3;
  cfg.hyperparams.patch_side = 32;
  cfg.hyperparams.patch_count = 8;
  return cfg;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("anosynth_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace anosynth::testing
