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

#include "anosynth/mask/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anosynth/core/error.hpp"

namespace anosynth::mask {
namespace {

constexpr double kPi = std::numbers::pi;

void check_canvas(int canvas_size) {
  require(canvas_size >= kMinCanvas, ErrorCode::InvalidArgument,
          "canvas size " + std::to_string(canvas_size) + " is below the minimum of " +
              std::to_string(kMinCanvas));
}

int round_count(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Line: return "line";
    case ShapeKind::Dot: return "dot";
    case ShapeKind::Freeform: return "freeform";
  }
  return "unknown";
}

ShapeKind shape_kind_from_string(std::string_view name) {
  if (name == "line") return ShapeKind::Line;
  if (name == "dot") return ShapeKind::Dot;
  if (name == "freeform") return ShapeKind::Freeform;
  fail(ErrorCode::InvalidArgument, "unknown shape kind '" + std::string(name) + "'");
}

void CompositeParams::validate() const {
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorCode::InvalidArgument, "alpha must be >= 0");
  require(m_max >= 1, ErrorCode::InvalidArgument, "m_max must be >= 1");
  require(retry_limit >= 1, ErrorCode::InvalidArgument, "retry_limit must be >= 1");
}

std::vector<double> region_count_pmf(const CompositeParams& params) {
  params.validate();
  std::vector<double> pmf(static_cast<std::size_t>(params.m_max));
  double total = 0.0;
  for (int i = 1; i <= params.m_max; ++i) {
    pmf[i - 1] = std::exp(-params.alpha * i);
    total += pmf[i - 1];
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

int sample_region_count(const CompositeParams& params, Rng& rng) {
  const auto pmf = region_count_pmf(params);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int i = 0; i < params.m_max; ++i) {
    cumulative += pmf[i];
    if (u < cumulative) return i + 1;
  }
  return params.m_max;
}

ShapeKind kind_of(const PrimitiveParams& params) {
  return static_cast<ShapeKind>(params.index());
}

// --- Line ------------------------------------------------------------------

LineParams sample_line(int canvas_size, Rng& rng) {
  check_canvas(canvas_size);
  LineParams p;
  p.center = {rng.uniform(0.0, canvas_size), rng.uniform(0.0, canvas_size)};
  p.angle = rng.uniform(0.0, kPi);
  p.length = rng.uniform(60.0, 200.0);
  p.points = round_count(rng.uniform(20.0, 40.0));

  Rng wavy_rng = rng.substream("wavy");
  p.wavy = wavy_rng.bernoulli(0.5);
  p.offsets.assign(p.points, 0.0);
  if (p.wavy) {
    std::vector<double> noise(p.points);
    for (double& e : noise) e = wavy_rng.normal(0.0, 14.0);
    // Smoothed along the point sequence: kernel 5, deviation 2.
    p.offsets = gaussian_blur_1d(noise, 5, 2.0);
  }

  Rng thickness_rng = rng.substream("thickness");
  p.thickness.resize(p.points);
  for (int& t : p.thickness) t = std::max(1, round_count(thickness_rng.uniform(1.0, 7.0)));
  return p;
}

std::vector<Point2> line_points(const LineParams& p) {
  std::vector<Point2> pts(static_cast<std::size_t>(p.points));
  const double c = std::cos(p.angle);
  const double s = std::sin(p.angle);
  for (int i = 0; i < p.points; ++i) {
    const double x = p.points == 1 ? 0.0 : -p.length / 2.0 + p.length * i / (p.points - 1);
    const double y = p.offsets.empty() ? 0.0 : p.offsets[i];
    pts[i] = {c * x - s * y + p.center.x, s * x + c * y + p.center.y};
  }
  return pts;
}

MaskCanvas render_line(int canvas_size, const LineParams& p) {
  check_canvas(canvas_size);
  require(p.thickness.size() == static_cast<std::size_t>(p.points), ErrorCode::InvalidArgument,
          "line thickness list must have one entry per point");
  Field field(canvas_size, canvas_size);
  const auto pts = line_points(p);
  for (int i = 0; i + 1 < p.points; ++i) draw_line(field, pts[i], pts[i + 1], p.thickness[i]);
  return binarize(field);
}

// --- Dot -------------------------------------------------------------------

DotParams sample_dot(int canvas_size, Rng& rng) {
  check_canvas(canvas_size);
  DotParams p;
  p.center = {rng.uniform(0.0, canvas_size), rng.uniform(0.0, canvas_size)};
  p.radius = rng.uniform(5.0, 35.0);
  p.points = round_count(rng.uniform(12.0, 30.0));
  p.oval = rng.uniform(0.6, 1.4);
  p.jitter = rng.uniform(0.05, 0.35);
  const double u = rng.uniform();
  p.gaussian_jitter = u < 0.66;

  Rng angle_rng = rng.substream("angles");
  p.angles.resize(p.points);
  for (double& a : p.angles) a = angle_rng.uniform(0.0, 2.0 * kPi);
  std::sort(p.angles.begin(), p.angles.end());

  Rng jitter_rng = rng.substream("jitter");
  const double scale = p.jitter * p.radius;
  p.radial_noise.resize(p.points);
  for (double& r : p.radial_noise) {
    r = p.gaussian_jitter ? jitter_rng.normal(0.0, scale) : jitter_rng.uniform(-scale, scale);
  }

  Rng blur_rng = rng.substream("blur");
  p.blur = blur_rng.bernoulli(0.5);
  if (p.blur) {
    static constexpr std::array<int, 3> kKernels{3, 5, 7};
    p.blur_kernel = kKernels[static_cast<std::size_t>(blur_rng.uniform_int(0, 2))];
  }
  return p;
}

std::vector<Point2> dot_vertices(const DotParams& p) {
  std::vector<Point2> v(static_cast<std::size_t>(p.points));
  for (int i = 0; i < p.points; ++i) {
    const double noise = p.radial_noise.empty() ? 0.0 : p.radial_noise[i];
    const double r = p.radius + noise;
    v[i] = {p.center.x + r * std::cos(p.angles[i]) * p.oval, p.center.y + r * std::sin(p.angles[i])};
  }
  return v;
}

MaskCanvas render_dot(int canvas_size, const DotParams& p) {
  check_canvas(canvas_size);
  require(p.angles.size() == static_cast<std::size_t>(p.points), ErrorCode::InvalidArgument,
          "dot angle list must have one entry per point");
  Field field(canvas_size, canvas_size);
  const auto vertices = dot_vertices(p);
  fill_polygon(field, vertices);
  if (p.blur) field = gaussian_blur(field, p.blur_kernel, 0.0);
  return binarize(field);
}

// --- Freeform --------------------------------------------------------------

int freeform_kernel(double sigma) { return 2 * static_cast<int>(std::lround(sigma)) + 1; }

FreeformParams sample_freeform(int canvas_size, Rng& rng) {
  check_canvas(canvas_size);
  FreeformParams p;
  p.steps = round_count(rng.uniform(300.0, 18000.0));
  p.sigma = rng.uniform(2.0, 12.0);
  p.start_x = std::min(canvas_size - 1, static_cast<int>(rng.uniform(0.0, canvas_size)));
  p.start_y = std::min(canvas_size - 1, static_cast<int>(rng.uniform(0.0, canvas_size)));

  Rng walk_rng = rng.substream("walk");
  p.deltas.resize(p.steps);
  for (auto& d : p.deltas) {
    d[0] = static_cast<std::int8_t>(walk_rng.uniform_int(-1, 1));
    d[1] = static_cast<std::int8_t>(walk_rng.uniform_int(-1, 1));
  }
  p.close = rng.substream("close").bernoulli(0.5);
  return p;
}

MaskCanvas render_freeform(int canvas_size, const FreeformParams& p) {
  check_canvas(canvas_size);
  Field field(canvas_size, canvas_size);
  int x = std::clamp(p.start_x, 0, canvas_size - 1);
  int y = std::clamp(p.start_y, 0, canvas_size - 1);
  for (const auto& d : p.deltas) {
    x = std::clamp(x + d[0], 0, canvas_size - 1);
    y = std::clamp(y + d[1], 0, canvas_size - 1);
    field.at(x, y) = 1.0;
  }
  field = gaussian_blur(field, freeform_kernel(p.sigma), p.sigma);
  if (p.close) field = erode(dilate(field, 3), 3);
  return largest_component(binarize(field));
}

PrimitiveParams sample_primitive(ShapeKind kind, int canvas_size, Rng& rng) {
  switch (kind) {
    case ShapeKind::Line: return sample_line(canvas_size, rng);
    case ShapeKind::Dot: return sample_dot(canvas_size, rng);
    case ShapeKind::Freeform: return sample_freeform(canvas_size, rng);
  }
  fail(ErrorCode::InvalidArgument, "unknown shape kind");
}

MaskCanvas render_primitive(int canvas_size, const PrimitiveParams& params) {
  return std::visit(
      [canvas_size](const auto& p) -> MaskCanvas {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineParams>) return render_line(canvas_size, p);
        else if constexpr (std::is_same_v<T, DotParams>) return render_dot(canvas_size, p);
        else return render_freeform(canvas_size, p);
      },
      params);
}

MaskCanvas gen_line_mask(int canvas_size, Rng& rng) {
  return render_line(canvas_size, sample_line(canvas_size, rng));
}

MaskCanvas gen_dot_mask(int canvas_size, Rng& rng) {
  return render_dot(canvas_size, sample_dot(canvas_size, rng));
}

MaskCanvas gen_freeform_mask(int canvas_size, Rng& rng) {
  return render_freeform(canvas_size, sample_freeform(canvas_size, rng));
}

}  // namespace anosynth::mask
