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


// Command-line front end: mask, index, generate, evaluate, replay.

#include <torch/torch.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "anosynth/backends/registry.hpp"
#include "anosynth/core/error.hpp"
#include "anosynth/core/image.hpp"
#include "anosynth/mask/anomaly_mask.hpp"
#include "anosynth/pipeline/dataset.hpp"
#include "anosynth/pipeline/evaluate.hpp"
#include "anosynth/pipeline/run.hpp"

namespace fs = std::filesystem;
using namespace anosynth;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return nlohmann::json::parse(in);
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void log_line(const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); }

// Options shared by subcommands that load backends.
struct BackendFlags {
  std::string file;
  bool real = false;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--backends", file, "JSON object of backend configs keyed by kind");
    app->add_flag("--real-backends", real, "use TorchScript exports for every backend");
    app->add_option("--backend-seed", seed, "seed of the synthetic backends");
  }

  backends::BackendConfigs resolve(backends::BackendConfigs base) const {
    if (seed != 0 || base.empty()) base = backends::synthetic_backend_configs(seed);
    if (real) {
      for (auto& [kind, cfg] : base) cfg.impl = "real";
    }
    if (!file.empty()) base = pipeline::backend_configs_from_json(read_json_file(file), base);
    return base;
  }
};

// Hyperparameter and mask overrides mirroring TrainHyperparams and
// CompositeParams.
struct ParamFlags {
  struct Entry {
    CLI::Option* opt;
    double value;
  };
  std::map<std::string, Entry> hp;
  std::map<std::string, Entry> composite;

  void add(CLI::App* app) {
    for (const char* name : {"iterations", "learning_rate", "patch_count", "patch_side", "perspective_distortion",
                             "lambda_gdir", "lambda_pdir", "lambda_tv", "lambda_c", "lambda_mclip"}) {
      auto& e = hp[name];
      std::string flag = std::string("--") + name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      e.opt = app->add_option(flag, e.value, std::string("override ") + name)->group("Hyperparameters");
    }
    for (const char* name : {"alpha", "m_max", "retry_limit"}) {
      auto& e = composite[name];
      std::string flag = std::string("--") + name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      e.opt = app->add_option(flag, e.value, std::string("override mask ") + name)->group("Mask");
    }
  }

  void apply(stylizer::TrainHyperparams& h, mask::CompositeParams& c) const {
    auto j = stylizer::to_json(h);
    for (const auto& [name, e] : hp) {
      if (e.opt->count() == 0) continue;
      if (j[name].is_number_integer()) j[name] = static_cast<int>(e.value);
      else j[name] = e.value;
    }
    h = stylizer::hyperparams_from_json(j);
    if (composite.at("alpha").opt->count()) c.alpha = composite.at("alpha").value;
    if (composite.at("m_max").opt->count()) c.m_max = static_cast<int>(composite.at("m_max").value);
    if (composite.at("retry_limit").opt->count()) c.retry_limit = static_cast<int>(composite.at("retry_limit").value);
    c.validate();
  }
};

mask::CategoryType guess_type(const std::string& category, const std::string& explicit_type) {
  if (!explicit_type.empty()) return mask::category_type_from_string(explicit_type);
  for (const char* name : {"mvtec_ad", "visa"}) {
    if (const auto* c = pipeline::DatasetDescriptor::builtin(name).find(category)) return c->type;
  }
  return mask::CategoryType::Object;
}

int print_summary(const pipeline::RunSummary& s) {
  std::printf("jobs: %d ok: %d failed: %d mask retries: %ld wall: %.1fs\n", s.total, s.succeeded, s.failed,
              s.retries, s.wall_seconds);
  return s.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  torch::set_num_threads(1);
  CLI::App app{"anosynth: zero-shot anomaly image generation"};
  app.require_subcommand(1);

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "draw one anomaly mask");
  int mask_w = 256, mask_h = 256;
  std::uint64_t mask_seed = 0;
  std::string mask_out, mask_image, mask_type;
  mask::CompositeParams mask_params;
  mask_cmd->add_option("--width", mask_w, "mask width");
  mask_cmd->add_option("--height", mask_h, "mask height");
  mask_cmd->add_option("--image", mask_image, "restrict to the foreground of this image");
  mask_cmd->add_option("--type", mask_type, "object or texture (with --image)");
  mask_cmd->add_option("--seed", mask_seed, "mask seed");
  mask_cmd->add_option("--alpha", mask_params.alpha, "region-count decay");
  mask_cmd->add_option("--m-max", mask_params.m_max, "maximum primitive count");
  mask_cmd->add_option("--retry-limit", mask_params.retry_limit, "attempts before giving up");
  mask_cmd->add_option("--out", mask_out, "output file stem")->required();
  BackendFlags mask_backends;
  mask_backends.add(mask_cmd);

  // index
  auto* index_cmd = app.add_subcommand("index", "index a dataset directory");
  std::string index_root, index_desc = "mvtec_ad", index_cats, index_out;
  index_cmd->add_option("--dataset-dir", index_root, "dataset root")->required();
  index_cmd->add_option("--descriptor", index_desc, "mvtec_ad, visa, or a descriptor JSON file");
  index_cmd->add_option("--categories", index_cats, "comma-separated subset");
  index_cmd->add_option("--out", index_out, "write the index JSON here instead of stdout");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "generate anomaly images");
  std::string gen_config, gen_image, gen_category, gen_defect, gen_type, gen_out, gen_dataset, gen_desc,
      gen_cats, gen_templates;
  std::uint64_t gen_seed = 0;
  int gen_workers = 0, gen_count = -1;
  gen_cmd->add_option("--config", gen_config, "run config JSON");
  gen_cmd->add_option("--image", gen_image, "single source image");
  gen_cmd->add_option("--category", gen_category, "category token (single-image mode)");
  gen_cmd->add_option("--defect", gen_defect, "defect token (single-image mode)");
  gen_cmd->add_option("--type", gen_type, "object or texture (single-image mode)");
  gen_cmd->add_option("--dataset-dir", gen_dataset, "dataset root (dataset mode)");
  gen_cmd->add_option("--descriptor", gen_desc, "mvtec_ad, visa, or a descriptor JSON file");
  gen_cmd->add_option("--categories", gen_cats, "comma-separated subset");
  gen_cmd->add_option("--count-per-category", gen_count, "images to generate per category");
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "master seed");
  gen_cmd->add_option("--workers", gen_workers, "parallel workers");
  gen_cmd->add_option("--templates", gen_templates, "prompt template file");
  gen_cmd->add_option("--out", gen_out, "output root");
  BackendFlags gen_backends;
  gen_backends.add(gen_cmd);
  ParamFlags gen_params;
  gen_params.add(gen_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a generated set");
  std::string eval_gen, eval_dataset, eval_metrics = "is,icl,detection", eval_report, eval_det_cfg;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("--gen-dir", eval_gen, "generated output root")->required();
  eval_cmd->add_option("--dataset-dir", eval_dataset, "dataset root (detection)");
  eval_cmd->add_option("--metrics", eval_metrics, "comma-separated: is, icl, detection");
  eval_cmd->add_option("--report", eval_report, "report JSON path")->required();
  eval_cmd->add_option("--detector-config", eval_det_cfg, "detector recipe JSON");
  eval_cmd->add_option("--seed", eval_seed, "detector seed");
  BackendFlags eval_backends;
  eval_backends.add(eval_cmd);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "re-run the job behind a manifest");
  std::string replay_manifest, replay_out;
  replay_cmd->add_option("manifest", replay_manifest, "manifest JSON")->required();
  replay_cmd->add_option("--out", replay_out, "output root for the regenerated job")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mask_cmd) {
      mask_params.validate();
      mask::MaskCanvas foreground = mask::MaskCanvas::ones(mask_w, mask_h);
      if (!mask_image.empty()) {
        const auto set = backends::load_backend_set(mask_backends.resolve({}));
        foreground = mask::compute_foreground_mask(load_image(mask_image),
                                                   {mask_type.empty() ? mask::CategoryType::Object
                                                                      : mask::category_type_from_string(mask_type)},
                                                   set.segmenter.get());
      }
      const auto am = mask::generate_anomaly_mask(mask_seed, mask_params, foreground);
      const fs::path stem(mask_out);
      if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
      mask::save_mask_png(stem.string() + ".mask.png", am.mask);
      write_json_file(stem.string() + ".mask.json", mask::to_json(am.record));
      std::printf("mask area %zu, retries %d\n", am.record.area, am.record.retries());
      return 0;
    }

    if (*index_cmd) {
      const auto index = pipeline::index_dataset(index_root, pipeline::DatasetDescriptor::resolve(index_desc),
                                                 split_list(index_cats));
      const auto j = pipeline::to_json(index);
      if (index_out.empty()) std::cout << j.dump(2) << "\n";
      else write_json_file(index_out, j);
      return 0;
    }

    if (*gen_cmd) {
      pipeline::RunConfig cfg;
      if (!gen_config.empty()) cfg = pipeline::load_run_config(gen_config);
      cfg.backends = gen_backends.resolve(cfg.backends);
      if (!gen_dataset.empty()) cfg.dataset_root = gen_dataset;
      if (!gen_desc.empty()) cfg.descriptor = gen_desc;
      if (!gen_cats.empty()) cfg.categories = split_list(gen_cats);
      if (gen_count >= 0) cfg.count_per_category = gen_count;
      if (gen_seed_opt->count()) cfg.seed = gen_seed;
      if (gen_workers > 0) cfg.workers = gen_workers;
      if (!gen_templates.empty()) cfg.templates = gen_templates;
      if (!gen_out.empty()) cfg.output = gen_out;
      gen_params.apply(cfg.hyperparams, cfg.composite);

      if (!gen_image.empty()) {
        require(!gen_category.empty(), ErrorCode::InvalidArgument, "--image needs --category");
        pipeline::StylizationJob job;
        job.category = gen_category;
        job.defect = gen_defect.empty() ? "defect" : gen_defect;
        job.type = guess_type(gen_category, gen_type);
        job.source = fs::absolute(gen_image).lexically_normal();
        job.seed = pipeline::job_seed(cfg.seed, gen_category, 0);
        job.id = gen_category + "_000000";
        return print_summary(pipeline::execute_jobs({job}, cfg, log_line));
      }
      require(!cfg.dataset_root.empty(), ErrorCode::InvalidArgument,
              "generate needs --image, --dataset-dir or a config with a dataset root");
      const auto summary = pipeline::execute_run(cfg, log_line);
      return print_summary(summary);
    }

    if (*eval_cmd) {
      pipeline::EvaluateOptions opt;
      opt.gen_dir = eval_gen;
      opt.dataset_dir = eval_dataset;
      const auto names = split_list(eval_metrics);
      opt.metrics = std::set<std::string>(names.begin(), names.end());
      opt.backends = eval_backends.resolve(opt.backends);
      if (!eval_det_cfg.empty()) opt.detection = eval::load_detection_config(eval_det_cfg);
      opt.seed = eval_seed;
      const auto report = pipeline::evaluate_generated(opt, log_line);
      write_json_file(eval_report, eval::to_json(report));
      std::printf("%s\n", eval::to_json(report).dump().c_str());
      return 0;
    }

    if (*replay_cmd) {
      const auto r = pipeline::replay(replay_manifest, replay_out, log_line);
      std::printf("image %s (expected %s, got %s); backends %s\n", r.image_matches ? "matches" : "DIFFERS",
                  r.expected_sha256.c_str(), r.actual_sha256.c_str(), r.backends_match ? "match" : "differ");
      return r.image_matches && r.backends_match ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
