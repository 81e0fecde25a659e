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

// Rasterization and filtering primitives used by the shape generators.

#include <span>
#include <vector>

#include "anosynth/mask/mask_canvas.hpp"

namespace anosynth::mask {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Real-valued scratch grid; the generators accumulate and blur here before
/// binarizing into a MaskCanvas.
struct Field {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Field(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Normalized Gaussian taps. `sigma <= 0` derives sigma from the size the way
/// OpenCV does: 0.3 * ((ksize - 1) * 0.5 - 1) + 0.8.
std::vector<double> gaussian_kernel(int ksize, double sigma);

/// 1-D Gaussian filter with reflect-101 borders (x[-1] = x[1]).
std::vector<double> gaussian_blur_1d(std::span<const double> values, int ksize, double sigma);

/// Separable 2-D Gaussian filter with reflect-101 borders.
Field gaussian_blur(const Field& field, int ksize, double sigma);

/// Grey-level dilation / erosion with a square window; out-of-canvas samples are ignored.
Field dilate(const Field& field, int ksize);
Field erode(const Field& field, int ksize);

/// Rescales by the field maximum (when positive) and thresholds at > 0.5.
MaskCanvas binarize(const Field& field);

/// Integer midpoint (Bresenham) line between rounded endpoints, stamping a
/// square brush of side `thickness` at every step. Pixels off the canvas are
/// clipped.
void draw_line(Field& field, Point2 from, Point2 to, int thickness);

/// Fills a polygon by sampling pixel centres with the even-odd rule.
void fill_polygon(Field& field, std::span<const Point2> vertices);

}  // namespace anosynth::mask
