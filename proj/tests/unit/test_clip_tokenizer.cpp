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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anosynth/backends/clip_tokenizer.hpp"
#include "doctest.h"

using anosynth::backends::ClipTokenizer;
using Ids = std::vector<std::int64_t>;

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Reference ids were produced by the Python CLIP tokenizer on the same
// merges tables and frozen here.
struct Case {
  const char* text;
  Ids tiny;
  Ids full;
};

const std::vector<Case>& cases() {
  static const std::vector<Case> c = {
      {"a photo of the flawless bottle.", {320, 517, 513, 519, 752, 687, 269},
       {320, 1125, 539, 518, 15531, 5392, 269}},
      {"A  Photo of an UNBLEMISHED metal nut!", {320, 517, 513, 657, 810, 776, 628, 256},
       {320, 1125, 539, 550, 569, 1447, 714, 1492, 4044, 6491, 256}},
      {"bottle with crack defect 42's", {687, 564, 723, 593, 275, 273, 6, 338},
       {5392, 593, 10334, 44013, 275, 273, 568}},
      {"zqx-- ??done", {89, 80, 343, 12, 268, 30, 286, 67, 788}, {89, 45038, 2432, 2197, 1700}},
      {"it's the <end_of_text> x", {72, 339, 6, 338, 519, 814, 343}, {585, 568, 518, 49407, 343}},
  };
  return c;
}

}  // namespace

TEST_CASE("tiny merges table matches the reference tokenizer") {
  const auto tok = ClipTokenizer::from_merges(read_text(ANOSYNTH_TEST_DATA "/clip_merges_tiny.txt"));
  CHECK(tok.sot_id() == 813);
  CHECK(tok.eot_id() == 814);
  CHECK(tok.vocab_size() == 815);
  for (const auto& c : cases()) {
    INFO(c.text);
    CHECK(tok.encode(c.text) == c.tiny);
  }
}

TEST_CASE("tokenize frames, pads and truncates") {
  const auto tok = ClipTokenizer::from_merges(read_text(ANOSYNTH_TEST_DATA "/clip_merges_tiny.txt"), 8);
  const Ids short_ids = tok.tokenize("a photo");
  CHECK(short_ids == Ids{813, 320, 517, 814, 0, 0, 0, 0});
  const Ids long_ids = tok.tokenize("photo photo photo photo photo photo photo photo photo");
  CHECK(long_ids.size() == 8);
  CHECK(long_ids.front() == 813);
  CHECK(long_ids.back() == 814);
}

TEST_CASE("full CLIP vocabulary, when available") {
  const char* path = std::getenv("ANOSYNTH_CLIP_VOCAB");
  if (path == nullptr || !std::filesystem::exists(path)) {
    MESSAGE("ANOSYNTH_CLIP_VOCAB not set; full-vocabulary check skipped");
    return;
  }
  const auto tok = ClipTokenizer::from_file(path);
  CHECK(tok.sot_id() == 49406);
  CHECK(tok.eot_id() == 49407);
  for (const auto& c : cases()) {
    INFO(c.text);
    CHECK(tok.encode(c.text) == c.full);
  }
  const Ids framed = tok.tokenize(std::string(500, 'x'));
  CHECK(framed.size() == 77);
  CHECK(framed.back() == 49407);
}
