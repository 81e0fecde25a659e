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

#include <cmath>
#include <numbers>

#include "anosynth/core/error.hpp"
#include "anosynth/mask/shapes.hpp"
#include "doctest.h"

using namespace anosynth;
using namespace anosynth::mask;

namespace {

constexpr int kCanvas = 512;
constexpr double kPi = std::numbers::pi;

// Direct evaluation of the normalized exponential-decay law.
double decay_probability(double alpha, int m_max, int i) {
  double z = 0.0;
  for (int j = 1; j <= m_max; ++j) z += std::exp(-alpha * j);
  return std::exp(-alpha * i) / z;
}

bool all_binary(const MaskCanvas& m) {
  for (auto v : m.data())
    if (v > 1) return false;
  return true;
}

struct Centroid {
  double x = 0, y = 0;
};

Centroid pixel_centroid(const MaskCanvas& m) {
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) {
        sx += x + 0.5;
        sy += y + 0.5;
        n += 1;
      }
  return {sx / n, sy / n};
}

// Shoelace centroid of a simple polygon.
Centroid polygon_centroid(const std::vector<Point2>& v) {
  double a = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    const double cross = p.x * q.y - q.x * p.y;
    a += cross;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  a *= 0.5;
  return {cx / (6 * a), cy / (6 * a)};
}

}  // namespace

TEST_CASE("region count: single outcome and uniform cases") {
  Rng rng(3);
  CompositeParams one{0.7, 1, 10};
  for (int i = 0; i < 100; ++i) CHECK(sample_region_count(one, rng) == 1);
  const auto flat = region_count_pmf({0.0, 4, 10});
  for (double p : flat) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("region count: empirical law matches the decay pmf") {
  const CompositeParams params{0.7, 5, 10};
  CHECK(decay_probability(0.7, 5, 1) == doctest::Approx(0.519).epsilon(0.001));
  const auto pmf = region_count_pmf(params);
  for (int i = 1; i <= 5; ++i) CHECK(pmf[i - 1] == doctest::Approx(decay_probability(0.7, 5, i)));

  Rng rng(2024);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_region_count(params, rng) - 1];
  double tv = 0.0;
  for (int i = 0; i < 5; ++i) tv += std::abs(counts[i] / double(n) - decay_probability(0.7, 5, i + 1));
  tv *= 0.5;
  CHECK(tv < 0.01);
  CHECK(std::abs(counts[0] / double(n) - 0.519) < 0.01);
}

TEST_CASE("region count parameters are validated") {
  CHECK_THROWS_AS(region_count_pmf({-0.1, 5, 10}), Error);
  CHECK_THROWS_AS(region_count_pmf({0.7, 0, 10}), Error);
  CHECK_THROWS_AS(region_count_pmf({0.7, 5, 0}), Error);
}

TEST_CASE("sampled parameters stay inside their intervals") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng r(seed);
    const auto line = sample_line(kCanvas, r);
    CHECK(line.angle >= 0.0);
    CHECK(line.angle < kPi);
    CHECK(line.length >= 60.0);
    CHECK(line.length <= 200.0);
    CHECK(line.points >= 20);
    CHECK(line.points <= 40);
    for (int t : line.thickness) {
      CHECK(t >= 1);
      CHECK(t <= 7);
    }
    CHECK(line.center.x >= 0.0);
    CHECK(line.center.x < kCanvas);

    const auto dot = sample_dot(kCanvas, r);
    CHECK(dot.radius >= 5.0);
    CHECK(dot.radius <= 35.0);
    CHECK(dot.points >= 12);
    CHECK(dot.points <= 30);
    CHECK(dot.oval >= 0.6);
    CHECK(dot.oval <= 1.4);
    CHECK(dot.jitter >= 0.05);
    CHECK(dot.jitter <= 0.35);
    for (std::size_t i = 0; i < dot.angles.size(); ++i) {
      CHECK(dot.angles[i] >= 0.0);
      CHECK(dot.angles[i] < 2 * kPi);
      if (i > 0) CHECK(dot.angles[i - 1] <= dot.angles[i]);
    }
    if (dot.blur) CHECK((dot.blur_kernel == 3 || dot.blur_kernel == 5 || dot.blur_kernel == 7));
    if (!dot.gaussian_jitter)
      for (double n : dot.radial_noise) CHECK(std::abs(n) <= dot.jitter * dot.radius);

    const auto ff = sample_freeform(kCanvas, r);
    CHECK(ff.steps >= 300);
    CHECK(ff.steps <= 18000);
    CHECK(ff.sigma >= 2.0);
    CHECK(ff.sigma <= 12.0);
    CHECK(ff.deltas.size() == static_cast<std::size_t>(ff.steps));
  }
}

TEST_CASE("canvas below the minimum is rejected") {
  Rng r(0);
  CHECK_THROWS_AS(gen_line_mask(128, r), Error);
}

TEST_CASE("line masks are binary, non-empty and deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const MaskCanvas m = gen_line_mask(kCanvas, a);
    CHECK(all_binary(m));
    CHECK(m.area() > 0);
    CHECK(m == gen_line_mask(kCanvas, b));
  }
}

TEST_CASE("flat one-pixel line equals the horizontal span at the centre") {
  LineParams p;
  p.center = {250.3, 120.7};
  p.angle = 0.0;
  p.length = 101.0;
  p.points = 25;
  p.wavy = false;
  p.offsets.assign(25, 0.0);
  p.thickness.assign(25, 1);
  const MaskCanvas m = render_line(kCanvas, p);
  // Independent rasterization: a horizontal segment between the rounded ends.
  const int row = static_cast<int>(std::lround(p.center.y));
  const int x0 = static_cast<int>(std::lround(p.center.x - p.length / 2));
  const int x1 = static_cast<int>(std::lround(p.center.x + p.length / 2));
  MaskCanvas expected(kCanvas, kCanvas);
  for (int x = x0; x <= x1; ++x) expected.set(x, row, true);
  CHECK(m == expected);
  CHECK(m.area() == doctest::Approx(p.length).epsilon(0.02));
}

TEST_CASE("dot masks are binary and deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const MaskCanvas m = gen_dot_mask(kCanvas, a);
    CHECK(all_binary(m));
    CHECK(m == gen_dot_mask(kCanvas, b));
  }
}

TEST_CASE("zero-jitter round dot is a circle of radius r") {
  Rng r(11);
  DotParams p = sample_dot(kCanvas, r);
  p.center = {256.0, 256.0};
  p.oval = 1.0;
  p.jitter = 0.0;
  p.radial_noise.assign(p.points, 0.0);
  p.blur = false;
  for (const auto& v : dot_vertices(p)) {
    CHECK(std::hypot(v.x - 256.0, v.y - 256.0) == doctest::Approx(p.radius));
  }
  const MaskCanvas m = render_dot(kCanvas, p);
  for (int y = 0; y < kCanvas; ++y)
    for (int x = 0; x < kCanvas; ++x)
      if (m.at(x, y)) CHECK(std::hypot(x + 0.5 - 256.0, y + 0.5 - 256.0) <= p.radius + 1.0);
  // Each vertex has a set pixel within one pixel of it.
  for (const auto& v : dot_vertices(p)) {
    bool near = false;
    for (int dy = -2; dy <= 2 && !near; ++dy)
      for (int dx = -2; dx <= 2 && !near; ++dx) {
        const int x = static_cast<int>(std::floor(v.x)) + dx;
        const int y = static_cast<int>(std::floor(v.y)) + dy;
        if (m.contains(x, y) && m.at(x, y) && std::hypot(x + 0.5 - v.x, y + 0.5 - v.y) <= 1.5)
          near = true;
      }
    CHECK(near);
  }
  // Polygon centroid (shoelace) matches the brute-force pixel mean.
  const Centroid pix = pixel_centroid(m);
  const Centroid poly = polygon_centroid(dot_vertices(p));
  CHECK(std::hypot(pix.x - poly.x, pix.y - poly.y) < 1.5);
}

TEST_CASE("evenly spaced zero-jitter dot is centred on c") {
  DotParams p;
  p.center = {256.0, 256.0};
  p.radius = 30.0;
  p.points = 20;
  for (int i = 0; i < p.points; ++i) p.angles.push_back(2 * kPi * i / p.points);
  p.oval = 1.0;
  p.radial_noise.assign(p.points, 0.0);
  const Centroid c = pixel_centroid(render_dot(kCanvas, p));
  CHECK(std::hypot(c.x - 256.0, c.y - 256.0) < 1.5);
}

TEST_CASE("freeform masks have exactly one component and are deterministic") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng a(seed), b(seed);
    const MaskCanvas m = gen_freeform_mask(kCanvas, a);
    CHECK(all_binary(m));
    CHECK(label_components(m).count == 1);
    CHECK(m == gen_freeform_mask(kCanvas, b));
  }
}

TEST_CASE("stationary walk produces the thresholded Gaussian disk") {
  FreeformParams p;
  p.steps = 500;
  p.sigma = 6.0;
  p.start_x = 200;
  p.start_y = 300;
  p.close = false;
  p.deltas.assign(p.steps, {0, 0});
  const MaskCanvas m = render_freeform(kCanvas, p);
  // Oracle: exp(-d^2 / (2 sigma^2)) > 0.5 rasterized at the start point,
  // cut to the (2 sigma + 1)-wide kernel support.
  const int half = freeform_kernel(p.sigma) / 2;
  MaskCanvas disk(kCanvas, kCanvas);
  for (int y = 0; y < kCanvas; ++y)
    for (int x = 0; x < kCanvas; ++x) {
      const double d2 = double(x - 200) * (x - 200) + double(y - 300) * (y - 300);
      const bool inside = std::abs(x - 200) <= half && std::abs(y - 300) <= half;
      disk.set(x, y, inside && std::exp(-d2 / (2 * p.sigma * p.sigma)) > 0.5);
    }
  CHECK(m == disk);
  CHECK(m.at(200, 300) == 1);

  p.close = true;
  const MaskCanvas closed = render_freeform(kCanvas, p);
  CHECK(closed.at(200, 300) == 1);
  CHECK(label_components(closed).count == 1);
  CHECK(closed.area() <= 4 * disk.area());
}

TEST_CASE("walk is clamped to the canvas") {
  FreeformParams p;
  p.steps = 2000;
  p.sigma = 2.0;
  p.start_x = 0;
  p.start_y = 0;
  p.deltas.assign(p.steps, {-1, -1});
  const MaskCanvas m = render_freeform(kCanvas, p);
  CHECK(m.at(0, 0) == 1);
  CHECK(label_components(m).count == 1);
}
