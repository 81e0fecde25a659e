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

#include "anosynth/prompt/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "anosynth/core/error.hpp"
#include "anosynth/core/hash.hpp"
#include "builtin_templates.hpp"

namespace anosynth::prompt {
namespace {

std::string replace_all(std::string text, std::string_view token, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

std::string normalize_token(std::string_view raw, std::string_view fallback) {
  std::string out(raw);
  std::replace(out.begin(), out.end(), '_', ' ');
  const auto first = out.find_first_not_of(" \t");
  if (first == std::string::npos) return std::string(fallback);
  const auto last = out.find_last_not_of(" \t");
  return out.substr(first, last - first + 1);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

backends::Embedding mean_embedding(const std::vector<backends::Embedding>& rows, int dim) {
  backends::Embedding mean(static_cast<std::size_t>(dim), 0.0);
  for (const auto& r : rows) {
    require(static_cast<int>(r.size()) == dim, ErrorCode::DimensionMismatch,
            "text encoder returned an embedding of unexpected size");
    for (int i = 0; i < dim; ++i) mean[i] += r[i];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

}  // namespace

CategoryDefectPair CategoryDefectPair::from_labels(std::string_view category, std::string_view defect) {
  return {normalize_token(category, kDefaultCategory), normalize_token(defect, kDefaultDefect)};
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = parse(kBuiltinTemplates);
  return set;
}

TemplateSet TemplateSet::parse(std::string_view text) {
  TemplateSet set;
  set.sha256 = sha256_hex(text);
  std::vector<std::string>* section = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("version:")) {
      set.version = std::string(trim(line.substr(8)));
    } else if (line == "[normal]") {
      section = &set.normal;
    } else if (line == "[anomaly]") {
      section = &set.anomaly;
    } else if (line == "[templates]") {
      section = &set.templates;
    } else if (section == nullptr) {
      fail(ErrorCode::InvalidArgument,
           "template file line " + std::to_string(line_no) + " is outside any section");
    } else {
      section->emplace_back(line);
    }
  }
  require(!set.normal.empty() && !set.anomaly.empty() && !set.templates.empty(),
          ErrorCode::InvalidArgument, "template file needs [normal], [anomaly] and [templates] entries");
  require(set.normal.size() == set.anomaly.size(), ErrorCode::InvalidArgument,
          "normal and anomaly descriptor counts differ");
  for (const auto& t : set.templates) {
    require(t.find("[s]") != std::string::npos, ErrorCode::InvalidArgument,
            "prompt template without [s]: " + t);
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open template file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::vector<std::string> build_state_descriptors(const CategoryDefectPair& pair, State state,
                                                 const TemplateSet& templates) {
  const auto& source = state == State::Normal ? templates.normal : templates.anomaly;
  const std::string category = pair.category.empty() ? std::string(kDefaultCategory) : pair.category;
  const std::string defect = pair.defect.empty() ? std::string(kDefaultDefect) : pair.defect;
  std::vector<std::string> out;
  out.reserve(source.size());
  for (const auto& s : source) out.push_back(replace_all(replace_all(s, "[c]", category), "[d]", defect));
  return out;
}

std::string render_prompt(std::string_view prompt_template, std::string_view descriptor) {
  const bool vowel = !descriptor.empty() &&
                     std::string_view("aeiouAEIOU").find(descriptor.front()) != std::string_view::npos;
  std::string out = replace_all(std::string(prompt_template), "a(n)", vowel ? "an" : "a");
  return replace_all(std::move(out), "[s]", descriptor);
}

PromptSet expand_prompts(const CategoryDefectPair& pair, const TemplateSet& templates) {
  PromptSet set;
  for (State state : {State::Normal, State::Anomaly}) {
    auto& target = state == State::Normal ? set.normal : set.anomaly;
    for (const auto& descriptor : build_state_descriptors(pair, state, templates)) {
      for (const auto& t : templates.templates) target.push_back(render_prompt(t, descriptor));
    }
  }
  return set;
}

PromptEmbeddings embed_prompt_set(const PromptSet& prompts, const backends::TextEncoder& encoder) {
  require(!prompts.normal.empty() && !prompts.anomaly.empty(), ErrorCode::InvalidArgument,
          "prompt sets must be non-empty");
  const int dim = encoder.embedding_dim();
  PromptEmbeddings out;
  out.dim = dim;
  out.normal = mean_embedding(encoder.embed_texts(prompts.normal), dim);
  out.anomaly = mean_embedding(encoder.embed_texts(prompts.anomaly), dim);
  return out;
}

}  // namespace anosynth::prompt
