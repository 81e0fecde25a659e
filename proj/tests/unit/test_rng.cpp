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
#include <set>

#include "anosynth/core/hash.hpp"
#include "anosynth/core/rng.hpp"
#include "doctest.h"

using anosynth::Rng;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams do not depend on parent consumption") {
  Rng a(7);
  const auto before = a.substream("mask", 3).next_u64();
  for (int i = 0; i < 10; ++i) a.uniform();
  CHECK(a.substream("mask", 3).next_u64() == before);
  CHECK(a.substream("mask", 4).next_u64() != before);
  CHECK(a.substream("net", 3).next_u64() != before);
}

TEST_CASE("uniform_int covers the closed range") {
  Rng r(1);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(-1, 1);
    CHECK(v >= -1);
    CHECK(v <= 1);
    seen.insert(v);
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("normal draws have the requested moments") {
  Rng r(99);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal(2.0, 3.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("fnv1a and sha256 known vectors") {
  CHECK(anosynth::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(anosynth::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(anosynth::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
