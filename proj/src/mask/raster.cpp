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

#include "anosynth/mask/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "anosynth/core/error.hpp"

namespace anosynth::mask {
namespace {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

void stamp(Field& field, int cx, int cy, int thickness) {
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  for (int dy = lo; dy <= hi; ++dy) {
    const int y = cy + dy;
    if (y < 0 || y >= field.height) continue;
    for (int dx = lo; dx <= hi; ++dx) {
      const int x = cx + dx;
      if (x < 0 || x >= field.width) continue;
      field.at(x, y) = 1.0;
    }
  }
}

template <typename Pick>
Field window_filter(const Field& field, int ksize, Pick pick) {
  require(ksize >= 1 && ksize % 2 == 1, ErrorCode::InvalidArgument, "kernel size must be odd");
  const int r = ksize / 2;
  Field out(field.width, field.height);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      double acc = field.at(x, y);
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= field.height) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= field.width) continue;
          acc = pick(acc, field.at(xx, yy));
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

std::vector<double> gaussian_kernel(int ksize, double sigma) {
  require(ksize >= 1 && ksize % 2 == 1, ErrorCode::InvalidArgument, "kernel size must be odd");
  if (sigma <= 0.0) sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8;
  std::vector<double> taps(static_cast<std::size_t>(ksize));
  const double centre = (ksize - 1) * 0.5;
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - centre;
    taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> gaussian_blur_1d(std::span<const double> values, int ksize, double sigma) {
  const auto taps = gaussian_kernel(ksize, sigma);
  const int n = static_cast<int>(values.size());
  const int r = ksize / 2;
  std::vector<double> out(values.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -r; k <= r; ++k) acc += taps[k + r] * values[reflect101(i + k, n)];
    out[i] = acc;
  }
  return out;
}

Field gaussian_blur(const Field& field, int ksize, double sigma) {
  const auto taps = gaussian_kernel(ksize, sigma);
  const int r = ksize / 2;
  Field tmp(field.width, field.height);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * field.at(reflect101(x + k, field.width), y);
      tmp.at(x, y) = acc;
    }
  }
  Field out(field.width, field.height);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp.at(x, reflect101(y + k, field.height));
      out.at(x, y) = acc;
    }
  }
  return out;
}

Field dilate(const Field& field, int ksize) {
  return window_filter(field, ksize, [](double a, double b) { return std::max(a, b); });
}

Field erode(const Field& field, int ksize) {
  return window_filter(field, ksize, [](double a, double b) { return std::min(a, b); });
}

MaskCanvas binarize(const Field& field) {
  const double peak = field.values.empty()
                          ? 0.0
                          : *std::max_element(field.values.begin(), field.values.end());
  const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  MaskCanvas out(field.width, field.height);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) out.set(x, y, field.at(x, y) * scale > 0.5);
  }
  return out;
}

void draw_line(Field& field, Point2 from, Point2 to, int thickness) {
  require(thickness >= 1, ErrorCode::InvalidArgument, "line thickness must be >= 1");
  // Clamp to a generous box so far-off endpoints cannot make the walk huge.
  const double bound = 4.0 * std::max(field.width, field.height);
  auto snap = [bound](double v) { return static_cast<long>(std::lround(std::clamp(v, -bound, bound))); };
  long x0 = snap(from.x), y0 = snap(from.y);
  const long x1 = snap(to.x), y1 = snap(to.y);
  const long dx = std::labs(x1 - x0);
  const long dy = -std::labs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1;
  const long sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  while (true) {
    stamp(field, static_cast<int>(x0), static_cast<int>(y0), thickness);
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void fill_polygon(Field& field, std::span<const Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return;
  std::vector<double> crossings;
  for (int y = 0; y < field.height; ++y) {
    const double yc = y + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = vertices[i];
      const Point2 b = vertices[(i + 1) % n];
      if (a.y == b.y) continue;
      const bool spans = (a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y);
      if (!spans) continue;
      crossings.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      // Pixel x is inside when its centre x + 0.5 lies in [left, right).
      const int first = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
      const int last = std::min(field.width - 1, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)) - 1);
      for (int x = first; x <= last; ++x) field.at(x, y) = 1.0;
    }
  }
}

}  // namespace anosynth::mask
