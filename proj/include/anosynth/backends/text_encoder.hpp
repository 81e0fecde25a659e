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

#include <string_view>
#include <vector>

#include "anosynth/backends/image_backends.hpp"

namespace anosynth::backends {

using Embedding = std::vector<double>;

/// Maps text into the joint embedding space. Outputs are unit length.
class TextEncoder : public Backend {
 public:
  virtual int embedding_dim() const = 0;
  virtual Embedding embed_text(std::string_view text) const = 0;
  /// Batched form; the default loops over embed_text.
  virtual std::vector<Embedding> embed_texts(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_text(t));
    return out;
  }
};

}  // namespace anosynth::backends
