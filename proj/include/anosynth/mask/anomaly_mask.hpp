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
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anosynth/backends/image_backends.hpp"
#include "anosynth/core/image.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/mask/shapes.hpp"

namespace anosynth::mask {

enum class CategoryType { Object, Texture };
std::string_view to_string(CategoryType type);
CategoryType category_type_from_string(std::string_view name);

struct ForegroundPolicy {
  CategoryType category_type = CategoryType::Object;
};

/// Union of all primitives. Raises DimensionMismatch on differing sizes and
/// InvalidArgument on an empty list.
MaskCanvas compose_masks(std::span<const MaskCanvas> primitives);

/// Texture categories: the whole image. Object categories: the negation of
/// the region the segmenter returns for the four image corners.
/// Raises DegenerateSegmentation when nothing is left as foreground.
MaskCanvas compute_foreground_mask(const Image& image, const ForegroundPolicy& policy,
                                   const backends::ForegroundSegmenter* segmenter);

/// Pixel-wise AND. Raises EmptyMask when the intersection is empty.
MaskCanvas finalize_anomaly_mask(const MaskCanvas& composite, const MaskCanvas& foreground);

/// Everything needed to reproduce one anomaly mask.
struct MaskRecord {
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  int generation_canvas = kReferenceCanvas;
  int attempts = 0;  // retries = attempts - 1
  CompositeParams composite;
  std::vector<PrimitiveParams> primitives;  // of the accepted attempt
  std::size_t area = 0;

  int retries() const { return attempts - 1; }
};

struct AnomalyMask {
  MaskCanvas mask;       // final anomaly mask (foreground-restricted)
  MaskCanvas composite;  // union of primitives at the target size
  MaskRecord record;
};

/// Samples primitives on the reference canvas, unions them, rescales to the
/// foreground's size and intersects. Empty results are resampled from a fresh
/// substream up to `params.retry_limit` times before EmptyMask is raised.
AnomalyMask generate_anomaly_mask(std::uint64_t seed, const CompositeParams& params,
                                  const MaskCanvas& foreground);

nlohmann::json to_json(const PrimitiveParams& params);
nlohmann::json to_json(const MaskRecord& record);

}  // namespace anosynth::mask
