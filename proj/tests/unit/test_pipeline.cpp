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


#include <fstream>
#include <map>

#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "anosynth/pipeline/dataset.hpp"
#include "anosynth/pipeline/evaluate.hpp"
#include "anosynth/pipeline/run.hpp"
#include "doctest.h"
#include "support/pipeline_fixtures.hpp"

namespace fs = std::filesystem;
using namespace anosynth;
using namespace anosynth::pipeline;

namespace {

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

// Relative path -> sha256 of every file below root.
std::map<std::string, std::string> tree_hashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = sha256_file(e.path());
  }
  return out;
}

DatasetIndex fake_index(int normals) {
  DatasetIndex index;
  index.descriptor = "mvtec_ad";
  const auto* bottle = DatasetDescriptor::builtin("mvtec_ad").find("bottle");
  CategoryIndex c{"bottle", bottle->type, bottle->defects, {}};
  for (int i = 0; i < normals; ++i) c.normals.push_back("n" + std::to_string(i) + ".png");
  index.categories["bottle"] = c;
  return index;
}

}  // namespace

TEST_CASE("builtin descriptors carry the defect lists") {
  const auto& mvtec = DatasetDescriptor::builtin("mvtec_ad");
  CHECK(mvtec.categories.size() == 15);
  const auto* bottle = mvtec.find("bottle");
  REQUIRE(bottle != nullptr);
  const std::vector<std::string> bottle_defects{"broken_large", "broken_small", "contamination"};
  CHECK(bottle->defects == bottle_defects);
  CHECK(bottle->type == mask::CategoryType::Object);
  CHECK(mvtec.find("carpet")->type == mask::CategoryType::Texture);

  const auto& visa = DatasetDescriptor::builtin("visa");
  CHECK(visa.categories.size() == 12);
  const auto* candle = visa.find("candle");
  REQUIRE(candle != nullptr);
  CHECK(candle->defects.size() == 1);
  CHECK(candle->defects[0] == "defect");
  CHECK(&DatasetDescriptor::builtin("mvtec") == &mvtec);
  CHECK_THROWS_AS(DatasetDescriptor::builtin("nope"), Error);
}

TEST_CASE("indexing a toy tree") {
  const auto root = testing::scratch_dir("index");
  testing::write_toy_dataset(root, {"bottle", "carpet"}, 3, 32);
  const auto& desc = DatasetDescriptor::builtin("mvtec_ad");

  const auto index = index_dataset(root, desc, {"bottle", "carpet"});
  REQUIRE(index.categories.size() == 2);
  const auto& b = index.categories.at("bottle");
  CHECK(b.normals.size() == 3);
  CHECK(std::is_sorted(b.normals.begin(), b.normals.end()));
  CHECK(b.defects.size() == 3);

  // Without a filter every descriptor category must exist.
  CHECK_THROWS_AS(index_dataset(root, desc), Error);
  CHECK_THROWS_AS(index_dataset(root, desc, {"bottle", "not_a_category"}), Error);

  const auto tests = index_test_split(root, "bottle");
  REQUIRE(tests.size() == 2);
  int with_mask = 0;
  for (const auto& t : tests) with_mask += t.mask.has_value() ? 1 : 0;
  CHECK(with_mask == 1);
}

TEST_CASE("empty normal directories are rejected") {
  const auto root = testing::scratch_dir("index_empty");
  fs::create_directories(root / "bottle" / "train" / "good");
  try {
    index_dataset(root, DatasetDescriptor::builtin("mvtec_ad"), {"bottle"});
    FAIL("expected a dataset error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Dataset);
  }
  CHECK_THROWS_AS(index_dataset(root / "missing", DatasetDescriptor::builtin("mvtec_ad"), {"bottle"}), Error);
}

TEST_CASE("VisA layout falls back to Data/Images/Normal") {
  const auto root = testing::scratch_dir("index_visa");
  fs::create_directories(root / "candle" / "Data" / "Images" / "Normal");
  save_png(root / "candle" / "Data" / "Images" / "Normal" / "0001.JPG", testing::toy_product(16, 3));
  const auto index = index_dataset(root, DatasetDescriptor::builtin("visa"), {"candle"});
  CHECK(index.categories.at("candle").normals.size() == 1);
  RunConfig cfg;
  cfg.count_per_category = 2;
  const auto jobs = plan_jobs(index, cfg);
  REQUIRE(jobs.size() == 2);
  CHECK(jobs[0].defect == "defect");
  CHECK(jobs[0].pair().category == "candle");
}

TEST_CASE("job planning cycles normals and is seed-driven") {
  const auto index = fake_index(2);
  RunConfig cfg;
  cfg.count_per_category = 5;
  cfg.seed = 11;
  const auto jobs = plan_jobs(index, cfg);
  REQUIRE(jobs.size() == 5);
  CHECK(jobs[0].source == jobs[2].source);
  CHECK(jobs[1].source == jobs[3].source);
  CHECK(jobs[0].source != jobs[1].source);
  CHECK(jobs[3].id == "bottle_000003");
  CHECK(jobs[3].stem() == fs::path("bottle") / jobs[3].defect / "bottle_000003");

  // Same seed, same plan; job seeds do not depend on how many jobs follow.
  const auto again = plan_jobs(index, cfg);
  cfg.count_per_category = 2;
  const auto shorter = plan_jobs(index, cfg);
  for (int i = 0; i < 2; ++i) {
    CHECK(jobs[i].seed == again[i].seed);
    CHECK(jobs[i].defect == again[i].defect);
    CHECK(jobs[i].seed == shorter[i].seed);
  }
  std::set<std::uint64_t> seeds;
  for (const auto& j : jobs) seeds.insert(j.seed);
  CHECK(seeds.size() == jobs.size());
  cfg.seed = 12;
  CHECK(plan_jobs(index, cfg)[0].seed != jobs[0].seed);
}

TEST_CASE("defects are drawn uniformly") {
  const auto index = fake_index(4);
  RunConfig cfg;
  cfg.count_per_category = 3000;
  cfg.seed = 5;
  std::map<std::string, int> counts;
  for (const auto& j : plan_jobs(index, cfg)) ++counts[j.defect];
  REQUIRE(counts.size() == 3);
  for (const auto& [d, n] : counts) CHECK(std::abs(n / 3000.0 - 1.0 / 3.0) < 0.03);
}

TEST_CASE("run config JSON round trip") {
  RunConfig cfg = testing::small_run_config("/data", "/out", {"bottle"}, 4, 99);
  cfg.composite.alpha = 0.5;
  cfg.workers = 3;
  const auto back = run_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  auto j = to_json(cfg);
  j["bogus"] = 1;
  CHECK_THROWS_AS(run_config_from_json(j), Error);
}

TEST_CASE("a zero-count run writes an empty summary") {
  const auto root = testing::scratch_dir("zero");
  testing::write_toy_dataset(root / "ds", {"bottle"}, 1, 32);
  const auto cfg = testing::small_run_config(root / "ds", root / "out", {"bottle"}, 0, 1);
  const auto summary = execute_run(cfg);
  CHECK(summary.total == 0);
  CHECK(summary.failed == 0);
  const auto j = read_json(root / "out" / "run_summary.json");
  CHECK(j["schema"] == kSummarySchema);
  CHECK(j["jobs"].empty());
}

TEST_CASE("one-job smoke run writes every artifact") {
  const auto root = testing::scratch_dir("smoke");
  testing::write_toy_dataset(root / "ds", {"bottle"}, 1, 64);
  const auto cfg = testing::small_run_config(root / "ds", root / "out", {"bottle"}, 1, 3);
  const auto summary = execute_run(cfg);
  REQUIRE(summary.succeeded == 1);
  const auto job = plan_jobs(index_dataset(cfg.dataset_root, DatasetDescriptor::builtin("mvtec_ad"), {"bottle"}),
                             cfg)[0];
  const fs::path stem = root / "out" / job.stem();
  for (const char* ext : {".png", ".mask.png", ".trace.jsonl", ".manifest.json"}) {
    CHECK_MESSAGE(fs::exists(stem.string() + ext), ext);
  }
  const auto m = read_json(stem.string() + ".manifest.json");
  CHECK(m["schema"] == kManifestSchema);
  CHECK(m["prompt"]["category"] == "bottle");
  CHECK(m["hyperparams"]["iterations"] == 3);
  CHECK(m["outputs"]["image"]["sha256"] == summary.jobs[0].image_sha256);
  CHECK(sha256_file(stem.string() + ".png") == summary.jobs[0].image_sha256);
  CHECK(m["backends"]["identities"].size() == 6);

  // One trace line per iteration.
  std::ifstream trace(stem.string() + ".trace.jsonl");
  int lines = 0;
  for (std::string line; std::getline(trace, line);) {
    const auto t = nlohmann::json::parse(line);
    CHECK(t["iteration"] == lines);
    CHECK(t.contains("total"));
    ++lines;
  }
  CHECK(lines == 3);

  // The output differs from the source only inside the mask.
  const Image src = load_image(job.source);
  const Image out = load_image(stem.string() + ".png");
  const auto am = mask::load_mask_png(stem.string() + ".mask.png");
  REQUIRE(out.width == src.width);
  bool outside_equal = true;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::size_t i = (static_cast<std::size_t>(y) * src.width + x) * 3 + c;
        if (!am.at(x, y) && out.data[i] != src.data[i]) outside_equal = false;
      }
  CHECK(outside_equal);

  // Replay regenerates the same bytes.
  const auto r = replay(stem.string() + ".manifest.json", root / "replay");
  CHECK(r.image_matches);
  CHECK(r.backends_match);
}

TEST_CASE("runs are bit-identical across reruns and worker counts") {
  const auto root = testing::scratch_dir("determinism");
  testing::write_toy_dataset(root / "ds", {"bottle", "carpet"}, 2, 64);
  auto cfg = testing::small_run_config(root / "ds", root / "a", {"bottle", "carpet"}, 2, 21);
  REQUIRE(execute_run(cfg).failed == 0);
  cfg.output = root / "b";
  cfg.workers = 2;
  REQUIRE(execute_run(cfg).failed == 0);
  const auto a = tree_hashes(root / "a");
  CHECK(a.size() == 2 + 4 * 4);
  CHECK(a == tree_hashes(root / "b"));
}

TEST_CASE("shared foreground cache does not change results") {
  const auto root = testing::scratch_dir("cache");
  testing::write_toy_dataset(root / "ds", {"bottle"}, 1, 64);
  auto cfg = testing::small_run_config(root / "ds", root / "both", {"bottle"}, 2, 8);
  const auto index = index_dataset(cfg.dataset_root, DatasetDescriptor::builtin("mvtec_ad"), {"bottle"});
  const auto jobs = plan_jobs(index, cfg);
  REQUIRE(jobs[0].source == jobs[1].source);
  const auto both = execute_jobs(jobs, cfg);
  cfg.output = root / "alone";
  const auto alone = execute_jobs({jobs[1]}, cfg);
  REQUIRE(both.succeeded == 2);
  REQUIRE(alone.succeeded == 1);
  CHECK(both.jobs[1].image_sha256 == alone.jobs[0].image_sha256);
}

TEST_CASE("evaluation over a generated tree") {
  const auto root = testing::scratch_dir("evaluate");
  testing::write_toy_dataset(root / "ds", {"bottle", "carpet"}, 2, 64);
  const auto cfg = testing::small_run_config(root / "ds", root / "gen", {"bottle", "carpet"}, 2, 4);
  REQUIRE(execute_run(cfg).failed == 0);
  REQUIRE(scan_generated(root / "gen").size() == 4);

  EvaluateOptions opt;
  opt.gen_dir = root / "gen";
  opt.dataset_dir = root / "ds";
  opt.detection.epochs = 2;
  opt.detection.image_size = 32;
  const auto report = evaluate_generated(opt);
  REQUIRE(report.is_score.has_value());
  CHECK(*report.is_score >= 1.0);
  REQUIRE(report.icl_score.has_value());
  CHECK(*report.icl_score > 0.0);
  REQUIRE(report.detection.has_value());
  const auto j = eval::to_json(report);
  CHECK(j["schema"] == eval::kMetricsSchema);
  CHECK(j["detection"].contains("pro"));

  opt.metrics = {"is"};
  const auto only_is = evaluate_generated(opt);
  CHECK(only_is.is_score.has_value());
  CHECK_FALSE(only_is.icl_score.has_value());
  CHECK_FALSE(only_is.detection.has_value());
}
