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
#include <cstdlib>
#include <numeric>

#include "anosynth/backends/registry.hpp"
#include "anosynth/backends/synthetic.hpp"
#include "anosynth/backends/tensor_image.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/rng.hpp"
#include "doctest.h"

using namespace anosynth;
using namespace anosynth::backends;

namespace {

double norm(const Embedding& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Image random_image(int w, int h, std::uint64_t seed) {
  Rng r(seed);
  Image im(w, h, 3);
  for (float& v : im.data) v = static_cast<float>(r.uniform());
  return im;
}

}  // namespace

TEST_CASE("tensor conversions round-trip") {
  const Image im = random_image(7, 5, 1);
  const torch::Tensor t = image_to_tensor(im);
  CHECK(t.sizes() == torch::IntArrayRef({1, 3, 5, 7}));
  CHECK(t[0][2][4][6].item<float>() == im.at(6, 4, 2));
  CHECK(tensor_to_image(t).data == im.data);
  mask::MaskCanvas m(4, 3);
  m.set(1, 2, true);
  const torch::Tensor mt = mask_to_tensor(m);
  CHECK(mt.sum().item<float>() == 1.0f);
  CHECK(mt[0][0][2][1].item<float>() == 1.0f);
}

TEST_CASE("synthetic text encoder is a seeded hash to the unit sphere") {
  const SyntheticTextEncoder enc(0);
  const Embedding a = enc.embed_text("a photo of the flawless bottle.");
  CHECK(a.size() == 32);
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(enc.embed_text("a photo of the flawless bottle.") == a);
  CHECK(enc.embed_text("a photo of the perfect bottle.") != a);
  CHECK(SyntheticTextEncoder(1).embed_text("a photo of the flawless bottle.") != a);
}

TEST_CASE("preprocessing: resize only when needed, then normalize") {
  Preprocess spec;
  spec.input_size = 8;
  spec.mean = {0.5, 0.25, 0.0};
  spec.std = {0.5, 0.5, 2.0};
  const torch::Tensor constant = torch::full({1, 3, 20, 20}, 0.75, torch::kFloat64);
  const torch::Tensor out = preprocess_for_encoder(constant, spec);
  CHECK(out.sizes() == torch::IntArrayRef({1, 3, 8, 8}));
  CHECK(out[0][0].max().item<double>() == doctest::Approx(0.5));
  CHECK(out[0][1].min().item<double>() == doctest::Approx(1.0));
  CHECK(out[0][2].mean().item<double>() == doctest::Approx(0.375));
  const torch::Tensor same = torch::rand({1, 3, 8, 8}, torch::kFloat64);
  Preprocess identity;
  identity.input_size = 8;
  CHECK(torch::equal(preprocess_for_encoder(same, identity), same));
}

TEST_CASE("synthetic image encoder equals the closed-form linear map") {
  const SyntheticImageEncoder enc(3);
  const torch::Tensor x = torch::rand({2, 3, 16, 16}, torch::kFloat64);
  const torch::Tensor got = enc.encode(x);
  // Oracle: explicit luminance, flatten, matrix product, division by norm.
  const torch::Tensor g = 0.299 * x.select(1, 0) + 0.587 * x.select(1, 1) + 0.114 * x.select(1, 2);
  const torch::Tensor raw = torch::matmul(g.reshape({2, 256}), enc.weights().t());
  const torch::Tensor expect = raw / raw.norm(2, 1, true);
  CHECK(torch::allclose(got, expect, 1e-12, 1e-12));
  CHECK(got.norm(2, 1).sub(1.0).abs().max().item<double>() < 1e-12);

  const Image im = random_image(40, 40, 9);
  CHECK(enc.embed_image(im) == enc.embed_image(im));
  CHECK(enc.embed_image(im).size() == 32);
}

TEST_CASE("synthetic image encoder is differentiable") {
  const SyntheticImageEncoder enc(3);
  torch::Tensor x = torch::rand({1, 3, 32, 32}, torch::kFloat64).requires_grad_(true);
  enc.encode(x).select(1, 0).sum().backward();
  REQUIRE(x.grad().defined());
  CHECK(x.grad().abs().sum().item<double>() > 0.0);
}

TEST_CASE("feature extractors return exactly the configured layers") {
  const SyntheticFeatureExtractor fe(5);
  const torch::Tensor x = torch::rand({1, 3, 32, 32});
  const auto maps = fe.features(x);
  CHECK(maps.size() == fe.layers().size());
  CHECK(fe.layers() == std::vector<std::string>{"conv4_2", "conv5_2"});
  CHECK(torch::equal(maps[1], fe.features(x)[1]));
  const IdentityFeatureExtractor id({"only"});
  CHECK(id.features(x).size() == 1);
  CHECK(torch::equal(id.features(x)[0], x));
}

TEST_CASE("synthetic segmenter grows the corner colour region") {
  Image im(30, 20, 3, 0.9f);
  for (int y = 5; y < 15; ++y)
    for (int x = 8; x < 22; ++x)
      for (int c = 0; c < 3; ++c) im.at(x, y, c) = 0.1f;
  const std::vector<PointPrompt> corners = {{0, 0, true}, {29, 0, true}, {0, 19, true}, {29, 19, true}};
  const auto bg = SyntheticSegmenter().segment(im, corners);
  CHECK(bg.width() == 30);
  CHECK(bg.height() == 20);
  CHECK(bg.area() == 30u * 20u - 10u * 14u);
  CHECK_FALSE(bg.at(10, 10));
}

TEST_CASE("synthetic classifier emits a probability vector") {
  const SyntheticClassifier cls(2);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto p = cls.class_probabilities(random_image(24, 24, s));
    CHECK(p.size() == 10);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : p) CHECK(v >= 0.0);
  }
}

TEST_CASE("synthetic perceptual distance is a zero-diagonal symmetric function") {
  const SyntheticPerceptualDistance d(4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Image a = random_image(48, 48, s);
    const Image b = random_image(48, 48, s + 100);
    CHECK(d.distance(a, a) == 0.0);
    CHECK(d.distance(a, b) > 0.0);
    CHECK(std::abs(d.distance(a, b) - d.distance(b, a)) <= 1e-6);
  }
}

TEST_CASE("load_backend: synthetic configs and json round trip") {
  const nlohmann::json j = {{"kind", "text_encoder"}, {"impl", "synthetic"}, {"seed", 0}};
  const auto cfg = j.get<BackendConfig>();
  CHECK(cfg.kind == BackendKind::TextEncoder);
  const auto backend = std::dynamic_pointer_cast<TextEncoder>(load_backend(cfg));
  REQUIRE(backend != nullptr);
  CHECK(backend->embed_text("x") == SyntheticTextEncoder(0).embed_text("x"));
  CHECK(nlohmann::json(cfg).get<BackendConfig>().seed == 0);
  CHECK_THROWS_AS((nlohmann::json{{"kind", "text_encoder"}, {"impl", "magic"}}.get<BackendConfig>()), Error);

  const BackendSet set = load_backend_set(synthetic_backend_configs(7));
  CHECK(set.shareable());
  CHECK(set.identities().size() == 6);
  CHECK(set.text->embedding_dim() == set.image->embedding_dim());
}

TEST_CASE("load_backend: missing real weights give an actionable error") {
  BackendConfig cfg;
  cfg.kind = BackendKind::ImageEncoder;
  cfg.impl = "real";
  cfg.model_dir = "/nonexistent/anosynth-models";
  unsetenv(kModelDirEnv);
  CHECK(resolve_model_root(cfg) == "/nonexistent/anosynth-models");
  try {
    load_backend(cfg);
    FAIL("expected a load error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendLoad);
    CHECK(std::string(e.what()).find("export_backends.py") != std::string::npos);
  }
  setenv(kModelDirEnv, "/tmp/override", 1);
  CHECK(resolve_model_root(cfg) == "/tmp/override");
  unsetenv(kModelDirEnv);
}

TEST_CASE("text and image encoders must share a dimension") {
  BackendSet set;
  set.text = std::make_shared<SyntheticTextEncoder>(0, 16);
  set.image = std::make_shared<SyntheticImageEncoder>(0, 32);
  try {
    set.validate();
    FAIL("expected a dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}
