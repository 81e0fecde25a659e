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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace anosynth::backends {

/// Byte-level BPE tokenizer compatible with the CLIP text tower.
///
/// Reads the gzipped merges file distributed with CLIP. Text cleaning covers
/// whitespace collapsing and ASCII lowercasing; the unicode repair and HTML
/// unescaping done by the reference Python code are not reproduced, which
/// only matters for non-ASCII or entity-encoded input. Non-ASCII code points
/// are treated as letters by the pre-tokenizer.
class ClipTokenizer {
 public:
  static ClipTokenizer from_file(const std::filesystem::path& merges_gz, int context_length = 77);
  /// `merges_text` is the decompressed file content (first line is a header).
  static ClipTokenizer from_merges(std::string_view merges_text, int context_length = 77);

  std::vector<std::int64_t> encode(std::string_view text) const;
  /// Start token, encoded text, end token, truncated and zero-padded to the
  /// context length.
  std::vector<std::int64_t> tokenize(std::string_view text) const;

  int context_length() const noexcept { return context_length_; }
  std::int64_t sot_id() const noexcept { return sot_; }
  std::int64_t eot_id() const noexcept { return eot_; }
  std::size_t vocab_size() const noexcept { return encoder_.size(); }

 private:
  std::vector<std::string> bpe(const std::string& token) const;

  int context_length_ = 77;
  std::int64_t sot_ = 0;
  std::int64_t eot_ = 0;
  std::unordered_map<std::string, std::int64_t> encoder_;
  std::map<std::pair<std::string, std::string>, int> ranks_;
  std::vector<std::string> byte_encoder_;  // byte value -> UTF-8 of its stand-in code point
};

}  // namespace anosynth::backends
