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

#include <cstddef>
#include <filesystem>
#include <vector>

namespace anosynth {

/// Interleaved (HWC) float image with values nominally in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const noexcept { return data.empty(); }
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  float& at(int x, int y, int c) { return data[index(x, y, c)]; }
  float at(int x, int y, int c) const { return data[index(x, y, c)]; }
  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height && channels == other.channels;
  }
};

/// Loads an 8-bit image as RGB (grayscale PNGs are expanded to three channels).
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG; values are clamped to [0, 1] and rounded to the nearest level.
void save_png(const std::filesystem::path& path, const Image& image);

/// Bicubic resample; a no-op copy when the size already matches.
Image resize_bicubic(const Image& image, int width, int height);

/// Quantizes to 8-bit levels exactly as save_png does, then maps back to [0, 1].
Image quantize_8bit(const Image& image);

}  // namespace anosynth
