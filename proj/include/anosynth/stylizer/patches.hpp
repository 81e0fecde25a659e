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

#include <torch/torch.h>

#include <array>
#include <vector>

#include "anosynth/core/rng.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/stylizer/losses.hpp"

namespace anosynth::stylizer {

/// Where a patch comes from and how it is warped. Sampling is separate from
/// extraction so a fixed plan can be re-applied to different images.
struct PatchPlan {
  int x0 = 0;
  int y0 = 0;
  int side = 0;
  double overlap = 0.0;  // mask pixels in the crop window / side^2
  /// Output-to-input homography (a, b, c, d, e, f, g, h) over pixel
  /// coordinates of the crop.
  std::array<double, 8> coeffs{1, 0, 0, 0, 1, 0, 0, 0};
};

struct PatchSample {
  torch::Tensor patch;  // [3, side, side], warped
  PatchPlan plan;
};

/// Fraction of mask pixels inside the window.
double window_overlap(const mask::MaskCanvas& mask, int x0, int y0, int side);

/// Random corner displacement in the style of a random perspective transform:
/// each corner moves inward by at most distortion * side / 2.
std::array<std::array<int, 2>, 4> sample_perspective_corners(int side, double distortion, Rng& rng);

/// Solves for the homography that maps `to` corners onto `from` corners.
std::array<double, 8> perspective_coefficients(const std::array<std::array<int, 2>, 4>& from,
                                               const std::array<std::array<int, 2>, 4>& to);

std::vector<PatchPlan> sample_patch_plans(const mask::MaskCanvas& mask, const TrainHyperparams& hp,
                                          Rng& rng);

/// Crops and warps every plan out of `image` ([1, 3, H, W]); differentiable.
/// Returns [n, 3, side, side].
torch::Tensor apply_patch_plans(const torch::Tensor& image, const std::vector<PatchPlan>& plans);

std::vector<PatchSample> extract_patches(const torch::Tensor& image, const mask::MaskCanvas& mask,
                                         const TrainHyperparams& hp, Rng& rng);

}  // namespace anosynth::stylizer
