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


#include "anosynth/pipeline/run.hpp"

#include <torch/torch.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "anosynth/core/rng.hpp"
#include "anosynth/stylizer/stylize.hpp"

namespace anosynth::pipeline {
namespace fs = std::filesystem;

namespace {

nlohmann::json composite_to_json(const mask::CompositeParams& p) {
  return {{"alpha", p.alpha}, {"m_max", p.m_max}, {"retry_limit", p.retry_limit}};
}

mask::CompositeParams composite_from_json(const nlohmann::json& j) {
  mask::CompositeParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "alpha") p.alpha = value.get<double>();
    else if (key == "m_max") p.m_max = value.get<int>();
    else if (key == "retry_limit") p.retry_limit = value.get<int>();
    else fail(ErrorCode::InvalidArgument, "unknown composite parameter '" + key + "'");
  }
  p.validate();
  return p;
}

nlohmann::json network_to_json(const stylizer::NetworkConfig& n) {
  return {{"down_blocks", n.down_blocks}, {"up_blocks", n.up_blocks}, {"widths", n.widths},
          {"leaky_slope", n.leaky_slope}, {"bottleneck", n.bottleneck}, {"output", "sigmoid"}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string pad6(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", v);
  return buf;
}

// Foreground masks and prompt embeddings shared by all workers of a run.
struct SharedCaches {
  std::mutex mutex;
  std::map<std::string, mask::MaskCanvas> foreground;
  std::map<std::string, prompt::PromptEmbeddings> prompts;
};

struct JobEnv {
  const RunConfig* cfg = nullptr;
  const prompt::TemplateSet* templates = nullptr;
  const backends::BackendSet* backends = nullptr;
  SharedCaches* caches = nullptr;
  nlohmann::json backend_record;
};

template <typename V, typename Make>
V cached(SharedCaches& c, std::map<std::string, V>& table, const std::string& key, Make make) {
  {
    std::lock_guard lock(c.mutex);
    if (auto it = table.find(key); it != table.end()) return it->second;
  }
  V value = make();  // deterministic, so a concurrent duplicate is harmless
  std::lock_guard lock(c.mutex);
  return table.emplace(key, std::move(value)).first->second;
}

JobOutcome run_one(const StylizationJob& job, const JobEnv& env) {
  const RunConfig& cfg = *env.cfg;
  const backends::BackendSet& b = *env.backends;
  JobOutcome outcome;
  outcome.id = job.id;

  const Image image = load_image(job.source);
  const std::string seg_id = b.segmenter ? b.segmenter->identity() : "none";
  const auto foreground =
      cached(*env.caches, env.caches->foreground,
             job.source.string() + "|" + std::string(mask::to_string(job.type)) + "|" + seg_id,
             [&] { return mask::compute_foreground_mask(image, {job.type}, b.segmenter.get()); });

  const auto am = mask::generate_anomaly_mask(derive_seed(job.seed, "mask"), cfg.composite, foreground);
  outcome.retries = am.record.retries();

  const auto pair = job.pair();
  const auto text = cached(*env.caches, env.caches->prompts,
                           pair.category + "\x1f" + pair.defect + "|" + env.templates->sha256 + "|" + b.text->identity(),
                           [&] { return prompt::embed_prompt_set(prompt::expand_prompts(pair, *env.templates), *b.text); });

  const auto result = stylizer::run_stylization(image, am.mask, text, {b.image.get(), b.features.get()},
                                                cfg.hyperparams, derive_seed(job.seed, "stylize"));

  const fs::path stem = cfg.output / job.stem();
  fs::create_directories(stem.parent_path());
  const fs::path image_path = stem.string() + ".png";
  const fs::path mask_path = stem.string() + ".mask.png";
  const fs::path trace_path = stem.string() + ".trace.jsonl";
  const fs::path manifest_path = stem.string() + ".manifest.json";
  save_png(image_path, quantize_8bit(result.image));
  mask::save_mask_png(mask_path, am.mask);
  std::string trace;
  for (const auto& rec : result.trace) trace += stylizer::to_json(rec).dump() + "\n";
  write_text(trace_path, trace);

  const auto file_entry = [&](const fs::path& p) {
    return nlohmann::json{{"file", fs::relative(p, cfg.output).generic_string()}, {"sha256", sha256_file(p)}};
  };
  nlohmann::json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["job"] = {{"id", job.id},
                     {"category", job.category},
                     {"defect", job.defect},
                     {"type", mask::to_string(job.type)},
                     {"ordinal", job.ordinal},
                     {"seed", job.seed}};
  manifest["source"] = {{"path", job.source.generic_string()}, {"sha256", sha256_file(job.source)},
                        {"width", image.width}, {"height", image.height}};
  manifest["prompt"] = {{"category", pair.category}, {"defect", pair.defect}};
  manifest["templates"] = {{"version", env.templates->version}, {"sha256", env.templates->sha256},
                           {"path", cfg.templates}};
  manifest["hyperparams"] = stylizer::to_json(cfg.hyperparams);
  manifest["composite"] = composite_to_json(cfg.composite);
  manifest["network"] = network_to_json(stylizer::NetworkConfig{});
  manifest["mask"] = mask::to_json(am.record);
  manifest["backends"] = env.backend_record;
  manifest["retries"] = outcome.retries;
  manifest["stylizer"] = {{"pdir_empty_steps", result.pdir_empty_steps},
                          {"initial_loss", stylizer::to_json(result.initial_loss)},
                          {"final_loss", stylizer::to_json(result.final_loss)},
                          {"network_sha256", result.network_checksum}};
  manifest["outputs"] = {{"image", file_entry(image_path)},
                         {"mask", file_entry(mask_path)},
                         {"trace", file_entry(trace_path)}};
  write_text(manifest_path, manifest.dump(2) + "\n");

  outcome.ok = true;
  outcome.image_sha256 = manifest["outputs"]["image"]["sha256"];
  return outcome;
}

}  // namespace

void RunConfig::validate() const {
  composite.validate();
  hyperparams.validate();
  require(count_per_category >= 0, ErrorCode::InvalidArgument, "count_per_category must be >= 0");
  require(workers >= 1, ErrorCode::InvalidArgument, "workers must be >= 1");
  require(!output.empty(), ErrorCode::InvalidArgument, "an output directory is required");
}

nlohmann::json backend_configs_to_json(const backends::BackendConfigs& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [kind, cfg] : c) j[backends::to_string(kind)] = cfg;
  return j;
}

backends::BackendConfigs backend_configs_from_json(const nlohmann::json& j, backends::BackendConfigs base) {
  require(j.is_object(), ErrorCode::InvalidArgument, "backends must be an object keyed by kind");
  for (const auto& [key, value] : j.items()) {
    auto v = value;
    if (!v.contains("kind")) v["kind"] = key;
    auto cfg = v.get<backends::BackendConfig>();
    require(backends::to_string(cfg.kind) == key, ErrorCode::InvalidArgument,
            "backend entry '" + key + "' declares kind " + backends::to_string(cfg.kind));
    base[cfg.kind] = cfg;
  }
  return base;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"dataset", {{"root", c.dataset_root.generic_string()}, {"descriptor", c.descriptor}, {"categories", c.categories}}},
          {"backends", backend_configs_to_json(c.backends)},
          {"composite", composite_to_json(c.composite)},
          {"hyperparams", stylizer::to_json(c.hyperparams)},
          {"templates", c.templates},
          {"count_per_category", c.count_per_category},
          {"seed", c.seed},
          {"output", c.output.generic_string()},
          {"workers", c.workers}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::InvalidArgument, "run config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "dataset") {
        c.dataset_root = value.value("root", std::string());
        c.descriptor = value.value("descriptor", c.descriptor);
        c.categories = value.value("categories", std::vector<std::string>{});
      } else if (key == "backends") {
        c.backends = backend_configs_from_json(value, c.backends);
      } else if (key == "composite") {
        c.composite = composite_from_json(value);
      } else if (key == "hyperparams") {
        c.hyperparams = stylizer::hyperparams_from_json(value);
      } else if (key == "templates") {
        c.templates = value.get<std::string>();
      } else if (key == "count_per_category") {
        c.count_per_category = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "output") {
        c.output = value.get<std::string>();
      } else if (key == "workers") {
        c.workers = value.get<int>();
      } else {
        fail(ErrorCode::InvalidArgument, "unknown run config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) { return run_config_from_json(read_json(path)); }

fs::path StylizationJob::stem() const { return fs::path(category) / defect / id; }

std::uint64_t job_seed(std::uint64_t master, std::string_view category, int ordinal) {
  return derive_seed(master, category, static_cast<std::uint64_t>(ordinal));
}

std::vector<StylizationJob> plan_jobs(const DatasetIndex& index, const RunConfig& cfg) {
  require(!index.empty(), ErrorCode::Dataset, "cannot plan jobs over an empty dataset index");
  std::vector<StylizationJob> jobs;
  for (const auto& [name, cat] : index.categories) {
    require(!cat.normals.empty(), ErrorCode::Dataset, "category " + name + " has no normal images");
    for (int k = 0; k < cfg.count_per_category; ++k) {
      StylizationJob job;
      job.category = name;
      job.type = cat.type;
      job.ordinal = k;
      job.id = name + "_" + pad6(k);
      job.seed = job_seed(cfg.seed, name, k);
      job.source = cat.normals[static_cast<std::size_t>(k) % cat.normals.size()];
      Rng pick(derive_seed(job.seed, "defect"));
      job.defect = cat.defects[static_cast<std::size_t>(
          pick.uniform_int(0, static_cast<std::int64_t>(cat.defects.size()) - 1))];
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json jobs = nlohmann::json::array();
  for (const auto& o : s.jobs) {
    nlohmann::json e{{"id", o.id}, {"status", o.ok ? "ok" : "failed"}, {"retries", o.retries}};
    if (!o.ok) e["error"] = o.error;
    if (o.ok) e["image_sha256"] = o.image_sha256;
    jobs.push_back(e);
  }
  return {{"schema", kSummarySchema}, {"total", s.total},   {"succeeded", s.succeeded},
          {"failed", s.failed},       {"retries", s.retries}, {"jobs", jobs}};
}

RunSummary execute_jobs(const std::vector<StylizationJob>& jobs, const RunConfig& cfg, const LogFn& log) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  // Each job is single-threaded; parallelism comes from workers.
  torch::set_num_threads(1);

  const prompt::TemplateSet templates =
      cfg.templates.empty() ? prompt::TemplateSet::builtin() : prompt::TemplateSet::load(cfg.templates);
  std::vector<std::unique_ptr<backends::BackendSet>> sets;
  sets.push_back(std::make_unique<backends::BackendSet>(backends::load_backend_set(cfg.backends)));
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  if (!sets.front()->shareable()) {
    for (int w = 1; w < workers; ++w) {
      sets.push_back(std::make_unique<backends::BackendSet>(backends::load_backend_set(cfg.backends)));
    }
  }
  SharedCaches caches;
  const nlohmann::json record{{"configs", backend_configs_to_json(cfg.backends)},
                              {"identities", sets.front()->identities()}};
  fs::create_directories(cfg.output);

  std::vector<JobOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&](int w) {
    JobEnv env{&cfg, &templates, sets[sets.size() == 1 ? 0 : static_cast<std::size_t>(w)].get(), &caches, record};
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outcomes[i] = run_one(jobs[i], env);
      } catch (const std::exception& e) {
        outcomes[i].id = jobs[i].id;
        outcomes[i].ok = false;
        outcomes[i].error = e.what();
      }
      if (log) {
        std::lock_guard lock(log_mutex);
        log(jobs[i].id + (outcomes[i].ok ? " ok" : " failed: " + outcomes[i].error));
      }
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  RunSummary s;
  s.total = static_cast<int>(jobs.size());
  for (auto& o : outcomes) {
    (o.ok ? s.succeeded : s.failed) += 1;
    s.retries += o.retries;
  }
  s.jobs = std::move(outcomes);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

RunSummary execute_run(const RunConfig& cfg, const LogFn& log) {
  cfg.validate();
  const auto index = index_dataset(cfg.dataset_root, DatasetDescriptor::resolve(cfg.descriptor), cfg.categories);
  const auto jobs = plan_jobs(index, cfg);
  fs::create_directories(cfg.output);
  auto recorded = to_json(cfg);
  recorded.erase("output");  // the tree must not depend on where it was written
  recorded.erase("workers");
  write_text(cfg.output / "run_config.json", recorded.dump(2) + "\n");
  const auto summary = execute_jobs(jobs, cfg, log);
  write_text(cfg.output / "run_summary.json", to_json(summary).dump(2) + "\n");
  return summary;
}

ReplayResult replay(const fs::path& manifest_path, const fs::path& out_root, const LogFn& log) {
  const auto m = read_json(manifest_path);
  require(m.value("schema", std::string()) == kManifestSchema, ErrorCode::InvalidArgument,
          manifest_path.string() + " is not a generation manifest");
  StylizationJob job;
  const auto& jj = m.at("job");
  job.id = jj.at("id").get<std::string>();
  job.category = jj.at("category").get<std::string>();
  job.defect = jj.at("defect").get<std::string>();
  job.type = mask::category_type_from_string(jj.at("type").get<std::string>());
  job.ordinal = jj.at("ordinal").get<int>();
  job.seed = jj.at("seed").get<std::uint64_t>();
  job.source = m.at("source").at("path").get<std::string>();
  require(fs::exists(job.source), ErrorCode::Io, "replay source image is missing: " + job.source.string());
  require(sha256_file(job.source) == m.at("source").at("sha256").get<std::string>(), ErrorCode::Dataset,
          "replay source image changed since generation: " + job.source.string());
  require(m.at("network") == network_to_json(stylizer::NetworkConfig{}), ErrorCode::InvalidArgument,
          "manifest was produced with a different network configuration");

  RunConfig cfg;
  cfg.backends = backend_configs_from_json(m.at("backends").at("configs"), cfg.backends);
  cfg.composite = composite_from_json(m.at("composite"));
  cfg.hyperparams = stylizer::hyperparams_from_json(m.at("hyperparams"));
  cfg.templates = m.at("templates").at("path").get<std::string>();
  cfg.output = out_root;
  const prompt::TemplateSet templates =
      cfg.templates.empty() ? prompt::TemplateSet::builtin() : prompt::TemplateSet::load(cfg.templates);
  require(templates.sha256 == m.at("templates").at("sha256").get<std::string>(), ErrorCode::InvalidArgument,
          "prompt template file differs from the one recorded in the manifest");

  const auto summary = execute_jobs({job}, cfg, log);
  const auto& outcome = summary.jobs.front();
  if (!outcome.ok) fail(ErrorCode::Backend, "replayed job failed: " + outcome.error);

  ReplayResult r;
  r.expected_sha256 = m.at("outputs").at("image").at("sha256").get<std::string>();
  r.actual_sha256 = outcome.image_sha256;
  r.image_matches = r.expected_sha256 == r.actual_sha256;
  r.image = out_root / (job.stem().string() + ".png");
  const auto regenerated = read_json(out_root / (job.stem().string() + ".manifest.json"));
  r.backends_match = regenerated.at("backends").at("identities") == m.at("backends").at("identities");
  return r;
}

}  // namespace anosynth::pipeline
