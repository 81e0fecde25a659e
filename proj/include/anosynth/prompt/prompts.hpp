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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "anosynth/backends/text_encoder.hpp"

namespace anosynth::prompt {

inline constexpr std::string_view kDefaultCategory = "sample";
inline constexpr std::string_view kDefaultDefect = "defect";

/// Category / defect tokens after defaulting and underscore replacement
/// ("metal_nut" becomes "metal nut").
struct CategoryDefectPair {
  std::string category;
  std::string defect;

  static CategoryDefectPair from_labels(std::string_view category, std::string_view defect);
};

enum class State { Normal, Anomaly };

/// Parsed template file: state descriptors per class plus prompt templates.
struct TemplateSet {
  std::string version;
  std::vector<std::string> normal;
  std::vector<std::string> anomaly;
  std::vector<std::string> templates;
  std::string sha256;  // of the source text

  /// The template file shipped with the library (compiled in).
  static const TemplateSet& builtin();
  static TemplateSet parse(std::string_view text);
  static TemplateSet load(const std::filesystem::path& path);
};

struct PromptSet {
  std::vector<std::string> normal;
  std::vector<std::string> anomaly;
};

struct PromptEmbeddings {
  backends::Embedding normal;
  backends::Embedding anomaly;
  int dim = 0;
};

std::vector<std::string> build_state_descriptors(const CategoryDefectPair& pair, State state,
                                                 const TemplateSet& templates = TemplateSet::builtin());

/// Inserts a descriptor into one prompt template, resolving "a(n)".
std::string render_prompt(std::string_view prompt_template, std::string_view descriptor);

/// Descriptor-major, template-minor expansion of both classes.
PromptSet expand_prompts(const CategoryDefectPair& pair,
                         const TemplateSet& templates = TemplateSet::builtin());

/// Arithmetic mean of the per-prompt embeddings of each class. The means are
/// not renormalized.
PromptEmbeddings embed_prompt_set(const PromptSet& prompts, const backends::TextEncoder& encoder);

}  // namespace anosynth::prompt
