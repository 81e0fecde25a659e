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

#include "anosynth/mask/mask_canvas.hpp"

#include <algorithm>
#include <numeric>
#include <opencv2/imgcodecs.hpp>

#include "anosynth/core/error.hpp"

namespace anosynth::mask {
namespace {

void check_shapes(const MaskCanvas& a, const MaskCanvas& b, const char* op) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::DimensionMismatch,
         std::string(op) + ": " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
             " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

template <typename Op>
MaskCanvas combine(const MaskCanvas& a, const MaskCanvas& b, Op op) {
  MaskCanvas out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) out.set(x, y, op(a.at(x, y), b.at(x, y)));
  }
  return out;
}

}  // namespace

MaskCanvas::MaskCanvas(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
  require(width > 0 && height > 0, ErrorCode::InvalidArgument, "mask dimensions must be positive");
}

std::size_t MaskCanvas::area() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

MaskCanvas negate(const MaskCanvas& m) {
  MaskCanvas out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) out.set(x, y, m.at(x, y) == 0);
  }
  return out;
}

MaskCanvas unite(const MaskCanvas& a, const MaskCanvas& b) {
  check_shapes(a, b, "unite");
  return combine(a, b, [](std::uint8_t p, std::uint8_t q) { return (p | q) != 0; });
}

MaskCanvas intersect(const MaskCanvas& a, const MaskCanvas& b) {
  check_shapes(a, b, "intersect");
  return combine(a, b, [](std::uint8_t p, std::uint8_t q) { return (p & q) != 0; });
}

bool is_subset(const MaskCanvas& inner, const MaskCanvas& outer) {
  check_shapes(inner, outer, "is_subset");
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner.data()[i] && !outer.data()[i]) return false;
  }
  return true;
}

MaskCanvas resize_nearest(const MaskCanvas& m, int width, int height) {
  if (m.width() == width && m.height() == height) return m;
  MaskCanvas out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(m.height() - 1, static_cast<int>((y + 0.5) * m.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(m.width() - 1, static_cast<int>((x + 0.5) * m.width() / width));
      out.set(x, y, m.at(sx, sy) != 0);
    }
  }
  return out;
}

ComponentLabels label_components(const MaskCanvas& m) {
  ComponentLabels result;
  result.labels.assign(m.size(), 0);
  std::vector<int> stack;
  const int w = m.width();
  const int h = m.height();
  for (int start = 0; start < static_cast<int>(m.size()); ++start) {
    if (!m.data()[start] || result.labels[start]) continue;
    const int label = ++result.count;
    std::size_t size = 0;
    result.labels[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      ++size;
      const int px = p % w;
      const int py = p / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx;
          const int ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int q = ny * w + nx;
          if (m.data()[q] && !result.labels[q]) {
            result.labels[q] = label;
            stack.push_back(q);
          }
        }
      }
    }
    result.sizes.push_back(size);
  }
  return result;
}

MaskCanvas largest_component(const MaskCanvas& m) {
  const ComponentLabels comps = label_components(m);
  MaskCanvas out(m.width(), m.height());
  if (comps.count == 0) return out;
  const auto best = std::max_element(comps.sizes.begin(), comps.sizes.end());
  const int keep = static_cast<int>(best - comps.sizes.begin()) + 1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      out.set(x, y, comps.labels[static_cast<std::size_t>(y) * m.width() + x] == keep);
    }
  }
  return out;
}

void save_mask_png(const std::filesystem::path& path, const MaskCanvas& m) {
  cv::Mat mat(m.height(), m.width(), CV_8UC1);
  for (int y = 0; y < m.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.width(); ++x) row[x] = m.at(x, y) ? 255 : 0;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) fail(ErrorCode::Io, "cannot write " + path.string());
}

MaskCanvas load_mask_png(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty()) fail(ErrorCode::Io, "cannot read mask " + path.string());
  MaskCanvas out(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) out.set(x, y, row[x] != 0);
  }
  return out;
}

}  // namespace anosynth::mask
