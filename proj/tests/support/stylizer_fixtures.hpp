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


// Shared toy inputs and checks for the stylizer tests and the acceptance
// runner.

#pragma once

#include <torch/torch.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "anosynth/backends/synthetic.hpp"
#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/image.hpp"
#include "anosynth/core/rng.hpp"
#include "anosynth/mask/mask_canvas.hpp"
#include "anosynth/prompt/prompts.hpp"
#include "anosynth/stylizer/stylize.hpp"

namespace anosynth::testing {

/// Smooth colour ramp with a faint checker pattern.
inline Image toy_image(int side, std::uint64_t seed) {
  Rng rng(seed);
  const double phase = rng.uniform(0.0, 6.28);
  Image img(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double checker = ((x / 4 + y / 4) % 2) ? 0.05 : -0.05;
      img.at(x, y, 0) = static_cast<float>(0.3 + 0.4 * x / side + checker);
      img.at(x, y, 1) = static_cast<float>(0.5 + 0.2 * std::sin(phase + 0.3 * y));
      img.at(x, y, 2) = static_cast<float>(0.6 - 0.3 * y / side + checker);
    }
  }
  // Snap to the 8-bit grid so PNG round trips are exact.
  return quantize_8bit(img);
}

/// Axis-aligned ellipse with seed-dependent centre and radii.
inline mask::MaskCanvas toy_mask(int side, std::uint64_t seed) {
  Rng rng(seed);
  const double cx = rng.uniform(0.3, 0.7) * side;
  const double cy = rng.uniform(0.3, 0.7) * side;
  const double rx = rng.uniform(0.1, 0.3) * side;
  const double ry = rng.uniform(0.1, 0.3) * side;
  mask::MaskCanvas m(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double u = (x + 0.5 - cx) / rx;
      const double v = (y + 0.5 - cy) / ry;
      m.set(x, y, u * u + v * v <= 1.0);
    }
  }
  return m;
}

struct ToyBackends {
  backends::SyntheticTextEncoder text;
  backends::SyntheticImageEncoder image;
  backends::SyntheticFeatureExtractor features;

  explicit ToyBackends(std::uint64_t seed) : text(seed), image(seed), features(seed) {}

  stylizer::StylizerBackends view() const { return {&image, &features}; }
  prompt::PromptEmbeddings prompts(std::string_view category = "bottle",
                                   std::string_view defect = "scratch") const {
    return prompt::embed_prompt_set(
        prompt::expand_prompts(prompt::CategoryDefectPair::from_labels(category, defect)), text);
  }
};

/// Hyperparameters scaled down so patches fit a small toy image.
inline stylizer::TrainHyperparams toy_hyperparams(int side) {
  stylizer::TrainHyperparams hp;
  hp.patch_side = side / 2;
  hp.patch_count = 16;
  return hp;
}

struct GradientCheck {
  int sampled = 0;
  int passed = 0;
  double worst = 0.0;
};

/// Central differences of the total loss with respect to network output
/// pixels inside the mask, in double precision, at a fixed patch plan.
inline GradientCheck gradient_check(std::uint64_t seed, int coordinates = 200, double step = 1e-4,
                                    double tolerance = 1e-3) {
  torch::NoGradGuard outer_off;
  constexpr int kSide = 16;
  const ToyBackends b(seed);
  const Image img = toy_image(kSide, seed);
  mask::MaskCanvas m(kSide, kSide);
  for (int y = 2; y < 14; ++y) {
    for (int x = 3; x < 13; ++x) m.set(x, y, true);
  }
  stylizer::TrainHyperparams hp;
  hp.patch_side = 8;
  hp.patch_count = 8;
  const auto input = backends::image_to_tensor(img, torch::kFloat64);
  const stylizer::Objective objective(input, m, b.prompts(), b.view(), hp);
  Rng rng(derive_seed(seed, "gradient-check"));
  const auto plans = stylizer::sample_patch_plans(m, hp, rng);

  std::vector<double> start(3 * kSide * kSide);
  for (double& v : start) v = rng.uniform(0.2, 0.8);
  const auto base = torch::tensor(start, torch::kFloat64).reshape({1, 3, kSide, kSide});

  torch::Tensor grad;
  {
    torch::AutoGradMode on(true);
    auto o = base.clone().requires_grad_(true);
    objective.evaluate(o, plans).total.backward();
    grad = o.grad().detach();
  }
  const auto loss_at = [&](const torch::Tensor& o) { return objective.evaluate(o, plans).total.item<double>(); };

  std::vector<int64_t> inside;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        if (m.at(x, y)) inside.push_back((static_cast<int64_t>(c) * kSide + y) * kSide + x);
      }
    }
  }
  GradientCheck out;
  const auto g = grad.reshape({-1});
  for (int k = 0; k < coordinates; ++k) {
    const int64_t idx = inside[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(inside.size()) - 1))];
    auto plus = base.clone();
    auto minus = base.clone();
    plus.view({-1})[idx] += step;
    minus.view({-1})[idx] -= step;
    const double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * step);
    const double analytic = g[idx].item<double>();
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    const double rel = scale < 1e-10 ? 0.0 : std::abs(numeric - analytic) / scale;
    out.worst = std::max(out.worst, rel);
    ++out.sampled;
    if (rel <= tolerance) ++out.passed;
  }
  return out;
}

}  // namespace anosynth::testing
