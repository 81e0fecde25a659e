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


#include "anosynth/stylizer/patches.hpp"

#include <cmath>
#include <utility>

#include "anosynth/core/error.hpp"

namespace anosynth::stylizer {
namespace {

namespace F = torch::nn::functional;

// Dense Gaussian elimination with partial pivoting for the 8x8 system.
std::array<double, 8> solve8(std::array<std::array<double, 9>, 8> a) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    require(std::abs(a[pivot][col]) > 1e-12, ErrorCode::InvalidArgument,
            "degenerate perspective corners");
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 8> x{};
  for (int i = 0; i < 8; ++i) x[i] = a[i][8] / a[i][i];
  return x;
}

// Sampling grid in grid_sample's normalized coordinates (align_corners off):
// output pixel centre (j + 0.5, i + 0.5) maps through the homography.
torch::Tensor perspective_grid(const std::array<double, 8>& k, int side) {
  std::vector<double> g(static_cast<std::size_t>(side) * side * 2);
  const double half = 0.5 * side;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const double x = j + 0.5;
      const double y = i + 0.5;
      const double den = k[6] * x + k[7] * y + 1.0;
      const std::size_t o = (static_cast<std::size_t>(i) * side + j) * 2;
      g[o] = (k[0] * x + k[1] * y + k[2]) / den / half - 1.0;
      g[o + 1] = (k[3] * x + k[4] * y + k[5]) / den / half - 1.0;
    }
  }
  return torch::tensor(g, torch::kFloat64).reshape({side, side, 2});
}

}  // namespace

double window_overlap(const mask::MaskCanvas& mask, int x0, int y0, int side) {
  require(x0 >= 0 && y0 >= 0 && x0 + side <= mask.width() && y0 + side <= mask.height() && side > 0,
          ErrorCode::InvalidArgument, "crop window outside the mask");
  std::size_t count = 0;
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) count += mask.at(x, y);
  }
  return static_cast<double>(count) / (static_cast<double>(side) * side);
}

std::array<std::array<int, 2>, 4> sample_perspective_corners(int side, double distortion, Rng& rng) {
  const int d = static_cast<int>(distortion * (side / 2));
  const int lo_far = side - d - 1;
  const auto near = [&] { return static_cast<int>(rng.uniform_int(0, d)); };
  const auto far = [&] { return static_cast<int>(rng.uniform_int(lo_far, side - 1)); };
  std::array<std::array<int, 2>, 4> c{};
  c[0] = {near(), near()};  // top-left
  c[1][0] = far();          // top-right
  c[1][1] = near();
  c[2][0] = far();          // bottom-right
  c[2][1] = far();
  c[3][0] = near();         // bottom-left
  c[3][1] = far();
  return c;
}

std::array<double, 8> perspective_coefficients(const std::array<std::array<int, 2>, 4>& from,
                                               const std::array<std::array<int, 2>, 4>& to) {
  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const double x = to[i][0], y = to[i][1];
    const double u = from[i][0], v = from[i][1];
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  return solve8(a);
}

std::vector<PatchPlan> sample_patch_plans(const mask::MaskCanvas& mask, const TrainHyperparams& hp, Rng& rng) {
  hp.validate(mask.width(), mask.height());
  const int s = hp.patch_side;
  const std::array<std::array<int, 2>, 4> corners{{{0, 0}, {s - 1, 0}, {s - 1, s - 1}, {0, s - 1}}};
  std::vector<PatchPlan> plans;
  plans.reserve(static_cast<std::size_t>(hp.patch_count));
  for (int j = 0; j < hp.patch_count; ++j) {
    PatchPlan p;
    p.side = s;
    p.x0 = static_cast<int>(rng.uniform_int(0, mask.width() - s));
    p.y0 = static_cast<int>(rng.uniform_int(0, mask.height() - s));
    p.overlap = window_overlap(mask, p.x0, p.y0, s);
    p.coeffs = perspective_coefficients(corners, sample_perspective_corners(s, hp.perspective_distortion, rng));
    plans.push_back(p);
  }
  return plans;
}

torch::Tensor apply_patch_plans(const torch::Tensor& image, const std::vector<PatchPlan>& plans) {
  require(image.dim() == 4 && image.size(0) == 1, ErrorCode::DimensionMismatch,
          "patch extraction expects a single [1, C, H, W] image");
  require(!plans.empty(), ErrorCode::InvalidArgument, "no patch plans");
  const int s = plans.front().side;
  std::vector<torch::Tensor> crops, grids;
  crops.reserve(plans.size());
  grids.reserve(plans.size());
  for (const auto& p : plans) {
    require(p.side == s, ErrorCode::InvalidArgument, "patch plans must share one side length");
    require(p.x0 >= 0 && p.y0 >= 0 && p.x0 + s <= image.size(3) && p.y0 + s <= image.size(2),
            ErrorCode::InvalidArgument, "patch plan outside the image");
    crops.push_back(image.narrow(2, p.y0, s).narrow(3, p.x0, s));
    grids.push_back(perspective_grid(p.coeffs, s));
  }
  const auto grid = torch::stack(grids).to(image.dtype());
  return F::grid_sample(torch::cat(crops, 0), grid,
                        F::GridSampleFuncOptions().mode(torch::kBilinear).padding_mode(torch::kZeros).align_corners(false));
}

std::vector<PatchSample> extract_patches(const torch::Tensor& image, const mask::MaskCanvas& mask,
                                         const TrainHyperparams& hp, Rng& rng) {
  require(image.size(3) == mask.width() && image.size(2) == mask.height(), ErrorCode::DimensionMismatch,
          "patch extraction: image and mask differ in size");
  auto plans = sample_patch_plans(mask, hp, rng);
  const auto patches = apply_patch_plans(image, plans);
  std::vector<PatchSample> out;
  out.reserve(plans.size());
  for (std::size_t j = 0; j < plans.size(); ++j) out.push_back({patches[static_cast<int64_t>(j)], plans[j]});
  return out;
}

}  // namespace anosynth::stylizer
