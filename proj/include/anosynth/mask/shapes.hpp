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

// The three primitive shape generators (Line, Dot, Freeform) and the
// region-count law used to decide how many primitives a mask combines.
//
// Every generator is split in two: `sample_*` draws the parameters from the
// generator's own substreams, `render_*` turns a parameter set into pixels
// deterministically. Tests drive `render_*` with hand-built parameters.

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "anosynth/core/rng.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/mask/raster.hpp"

namespace anosynth::mask {

/// Side length the pixel-unit sampling ranges are calibrated for.
inline constexpr int kReferenceCanvas = 512;
/// Smallest canvas on which the Line length range still fits.
inline constexpr int kMinCanvas = 224;

enum class ShapeKind { Line, Dot, Freeform };
std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

struct CompositeParams {
  double alpha = 0.7;
  int m_max = 5;
  int retry_limit = 10;

  void validate() const;
};

/// P(m = i) for i = 1..m_max, proportional to exp(-alpha * i).
std::vector<double> region_count_pmf(const CompositeParams& params);
int sample_region_count(const CompositeParams& params, Rng& rng);

struct LineParams {
  Point2 center;
  double angle = 0.0;   // radians in [0, pi)
  double length = 0.0;  // pixels in [60, 200]
  int points = 0;       // in [20, 40]
  bool wavy = false;
  std::vector<double> offsets;  // perpendicular offset per point (all zero unless wavy)
  std::vector<int> thickness;   // per point in [1, 7]; segment i uses thickness[i]
};

struct DotParams {
  Point2 center;
  double radius = 0.0;  // [5, 35]
  int points = 0;       // [12, 30]
  std::vector<double> angles;  // sorted, [0, 2pi)
  double oval = 1.0;           // horizontal scale, [0.6, 1.4]
  double jitter = 0.0;         // beta, [0.05, 0.35]
  bool gaussian_jitter = false;
  std::vector<double> radial_noise;
  bool blur = false;
  int blur_kernel = 0;  // one of 3, 5, 7 when blur is set
};

struct FreeformParams {
  int steps = 0;       // [300, 18000]
  double sigma = 0.0;  // [2, 12]
  int start_x = 0;
  int start_y = 0;
  bool close = false;  // dilate-then-erode branch
  std::vector<std::array<std::int8_t, 2>> deltas;  // one (dx, dy) per step
};

using PrimitiveParams = std::variant<LineParams, DotParams, FreeformParams>;
ShapeKind kind_of(const PrimitiveParams& params);

/// Polygon vertices of a dot shape, before any blur.
std::vector<Point2> dot_vertices(const DotParams& params);
/// Rotated and translated polyline points of a line shape.
std::vector<Point2> line_points(const LineParams& params);
/// Blur size used for a freeform deviation: 2 * round(sigma) + 1.
int freeform_kernel(double sigma);

LineParams sample_line(int canvas_size, Rng& rng);
DotParams sample_dot(int canvas_size, Rng& rng);
FreeformParams sample_freeform(int canvas_size, Rng& rng);
PrimitiveParams sample_primitive(ShapeKind kind, int canvas_size, Rng& rng);

MaskCanvas render_line(int canvas_size, const LineParams& params);
MaskCanvas render_dot(int canvas_size, const DotParams& params);
MaskCanvas render_freeform(int canvas_size, const FreeformParams& params);
MaskCanvas render_primitive(int canvas_size, const PrimitiveParams& params);

MaskCanvas gen_line_mask(int canvas_size, Rng& rng);
MaskCanvas gen_dot_mask(int canvas_size, Rng& rng);
MaskCanvas gen_freeform_mask(int canvas_size, Rng& rng);

}  // namespace anosynth::mask
