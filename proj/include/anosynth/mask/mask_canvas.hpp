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
#include <cstdint>
#include <filesystem>
#include <vector>

namespace anosynth::mask {

/// Binary pixel grid. Every stored value is exactly 0 or 1.
class MaskCanvas {
 public:
  MaskCanvas() = default;
  MaskCanvas(int width, int height, std::uint8_t fill = 0);

  static MaskCanvas ones(int width, int height) { return MaskCanvas(width, height, 1); }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty_canvas() const noexcept { return data_.empty(); }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, bool on) { data_[index(x, y)] = on ? 1 : 0; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  /// Number of pixels set to 1.
  std::size_t area() const;
  bool any() const { return area() > 0; }
  bool same_shape(const MaskCanvas& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const MaskCanvas&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

MaskCanvas negate(const MaskCanvas& m);
/// Pixel-wise OR / AND; mismatched dimensions raise DimensionMismatch.
MaskCanvas unite(const MaskCanvas& a, const MaskCanvas& b);
MaskCanvas intersect(const MaskCanvas& a, const MaskCanvas& b);
/// True when every set pixel of `inner` is also set in `outer`.
bool is_subset(const MaskCanvas& inner, const MaskCanvas& outer);

/// Nearest-neighbour resample (keeps the mask binary).
MaskCanvas resize_nearest(const MaskCanvas& m, int width, int height);

/// Connected-component labels (8-connectivity); 0 is background, regions are
/// numbered from 1 in raster order of their first pixel.
struct ComponentLabels {
  int count = 0;
  std::vector<int> labels;
  std::vector<std::size_t> sizes;  // sizes[k] is the pixel count of label k+1
};
ComponentLabels label_components(const MaskCanvas& m);

/// Keeps only the largest 8-connected region (the earliest in raster order on ties).
MaskCanvas largest_component(const MaskCanvas& m);

void save_mask_png(const std::filesystem::path& path, const MaskCanvas& m);
/// Any non-zero pixel loads as 1.
MaskCanvas load_mask_png(const std::filesystem::path& path);

}  // namespace anosynth::mask
