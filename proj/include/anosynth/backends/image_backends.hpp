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

// Backends that consume whole images and never take part in gradient flow.
// Kept free of torch types so the mask and metric code can depend on them.

#include <span>
#include <string>
#include <vector>

#include "anosynth/core/image.hpp"
#include "anosynth/mask/mask_canvas.hpp"

namespace anosynth::backends {

/// Whether one instance may be called from several threads at once.
enum class Sharing { ConcurrentRead, Exclusive };

class Backend {
 public:
  virtual ~Backend() = default;
  /// Stable content identity recorded in run manifests (weights hash for
  /// file-backed models, a seed-derived tag for synthetic ones).
  virtual std::string identity() const = 0;
  virtual Sharing sharing() const { return Sharing::ConcurrentRead; }
};

struct PointPrompt {
  int x = 0;
  int y = 0;
  bool positive = true;
};

class ForegroundSegmenter : public Backend {
 public:
  /// Returns the region selected by the prompts, at the input's dimensions.
  virtual mask::MaskCanvas segment(const Image& image, std::span<const PointPrompt> prompts) const = 0;
};

class ClassifierBackend : public Backend {
 public:
  virtual int num_classes() const = 0;
  /// Non-negative entries summing to one.
  virtual std::vector<double> class_probabilities(const Image& image) const = 0;
};

class PerceptualDistanceBackend : public Backend {
 public:
  /// Non-negative, symmetric, zero on identical inputs.
  virtual double distance(const Image& a, const Image& b) const = 0;
};

}  // namespace anosynth::backends
