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

#include "anosynth/mask/anomaly_mask.hpp"

#include <array>
#include <string>

#include "anosynth/core/error.hpp"

namespace anosynth::mask {

std::string_view to_string(CategoryType type) {
  return type == CategoryType::Object ? "object" : "texture";
}

CategoryType category_type_from_string(std::string_view name) {
  if (name == "object") return CategoryType::Object;
  if (name == "texture") return CategoryType::Texture;
  fail(ErrorCode::InvalidArgument, "category type must be 'object' or 'texture', got '" +
                                       std::string(name) + "'");
}

MaskCanvas compose_masks(std::span<const MaskCanvas> primitives) {
  require(!primitives.empty(), ErrorCode::InvalidArgument, "compose_masks needs at least one mask");
  MaskCanvas out = primitives.front();
  for (std::size_t i = 1; i < primitives.size(); ++i) out = unite(out, primitives[i]);
  return out;
}

MaskCanvas compute_foreground_mask(const Image& image, const ForegroundPolicy& policy,
                                   const backends::ForegroundSegmenter* segmenter) {
  if (policy.category_type == CategoryType::Texture) {
    return MaskCanvas::ones(image.width, image.height);
  }
  require(segmenter != nullptr, ErrorCode::InvalidArgument,
          "object categories need a foreground segmenter");
  const std::array<backends::PointPrompt, 4> corners{{
      {0, 0, true},
      {image.width - 1, 0, true},
      {0, image.height - 1, true},
      {image.width - 1, image.height - 1, true},
  }};
  const MaskCanvas background = segmenter->segment(image, corners);
  if (background.width() != image.width || background.height() != image.height) {
    fail(ErrorCode::DimensionMismatch, "segmenter output does not match the image size");
  }
  MaskCanvas foreground = negate(background);
  if (!foreground.any()) {
    fail(ErrorCode::DegenerateSegmentation, "segmenter marked the entire image as background");
  }
  return foreground;
}

MaskCanvas finalize_anomaly_mask(const MaskCanvas& composite, const MaskCanvas& foreground) {
  MaskCanvas out = intersect(composite, foreground);
  if (!out.any()) fail(ErrorCode::EmptyMask, "anomaly mask does not overlap the foreground");
  return out;
}

AnomalyMask generate_anomaly_mask(std::uint64_t seed, const CompositeParams& params,
                                  const MaskCanvas& foreground) {
  params.validate();
  for (int attempt = 0; attempt < params.retry_limit; ++attempt) {
    const Rng attempt_rng(derive_seed(seed, "attempt", static_cast<std::uint64_t>(attempt)));
    Rng count_rng = attempt_rng.substream("count");
    const int count = sample_region_count(params, count_rng);

    std::vector<PrimitiveParams> primitives;
    std::vector<MaskCanvas> rendered;
    for (int i = 0; i < count; ++i) {
      Rng prim_rng = attempt_rng.substream("primitive", static_cast<std::uint64_t>(i));
      const auto kind = static_cast<ShapeKind>(prim_rng.substream("kind").uniform_int(0, 2));
      primitives.push_back(sample_primitive(kind, kReferenceCanvas, prim_rng));
      rendered.push_back(render_primitive(kReferenceCanvas, primitives.back()));
    }
    MaskCanvas composite =
        resize_nearest(compose_masks(rendered), foreground.width(), foreground.height());
    MaskCanvas final_mask = intersect(composite, foreground);
    if (!final_mask.any()) continue;

    AnomalyMask result{final_mask, composite, {}};
    result.record.seed = seed;
    result.record.width = foreground.width();
    result.record.height = foreground.height();
    result.record.attempts = attempt + 1;
    result.record.composite = params;
    result.record.primitives = std::move(primitives);
    result.record.area = final_mask.area();
    return result;
  }
  fail(ErrorCode::EmptyMask, "no non-empty anomaly mask after " +
                                 std::to_string(params.retry_limit) + " attempts");
}

nlohmann::json to_json(const PrimitiveParams& params) {
  return std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        nlohmann::json j;
        if constexpr (std::is_same_v<T, LineParams>) {
          j = {{"kind", "line"},
               {"center", {p.center.x, p.center.y}},
               {"angle", p.angle},
               {"length", p.length},
               {"points", p.points},
               {"wavy", p.wavy},
               {"offsets", p.offsets},
               {"thickness", p.thickness}};
        } else if constexpr (std::is_same_v<T, DotParams>) {
          j = {{"kind", "dot"},
               {"center", {p.center.x, p.center.y}},
               {"radius", p.radius},
               {"points", p.points},
               {"angles", p.angles},
               {"oval", p.oval},
               {"jitter", p.jitter},
               {"gaussian_jitter", p.gaussian_jitter},
               {"radial_noise", p.radial_noise},
               {"blur", p.blur},
               {"blur_kernel", p.blur_kernel}};
        } else {
          // The walk itself is regenerated from the seed; only its summary is stored.
          j = {{"kind", "freeform"},
               {"steps", p.steps},
               {"sigma", p.sigma},
               {"kernel", freeform_kernel(p.sigma)},
               {"start", {p.start_x, p.start_y}},
               {"close", p.close}};
        }
        return j;
      },
      params);
}

nlohmann::json to_json(const MaskRecord& r) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& p : r.primitives) prims.push_back(to_json(p));
  return {{"seed", r.seed},
          {"width", r.width},
          {"height", r.height},
          {"generation_canvas", r.generation_canvas},
          {"alpha", r.composite.alpha},
          {"m_max", r.composite.m_max},
          {"retry_limit", r.composite.retry_limit},
          {"attempts", r.attempts},
          {"retries", r.retries()},
          {"region_count", r.primitives.size()},
          {"area", r.area},
          {"primitives", prims}};
}

}  // namespace anosynth::mask
