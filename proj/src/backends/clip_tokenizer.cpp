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

#include "anosynth/backends/clip_tokenizer.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <limits>
#include <sstream>

#include "anosynth/core/error.hpp"

namespace anosynth::backends {
namespace {

constexpr int kMaxMerges = 49152 - 256 - 2;
constexpr std::string_view kSot = "<start_of_text>";
constexpr std::string_view kEot = "<end_of_text>";

std::string utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

// Printable stand-ins for every byte value. Returns (byte, code point) pairs
// in vocabulary order.
std::vector<std::pair<int, char32_t>> byte_code_points() {
  std::vector<std::pair<int, char32_t>> out;
  std::array<bool, 256> printable{};
  auto keep = [&](int lo, int hi) {
    for (int b = lo; b <= hi; ++b) {
      out.emplace_back(b, static_cast<char32_t>(b));
      printable[b] = true;
    }
  };
  keep('!', '~');
  keep(0xA1, 0xAC);
  keep(0xAE, 0xFF);
  int n = 0;
  for (int b = 0; b < 256; ++b)
    if (!printable[b]) out.emplace_back(b, static_cast<char32_t>(256 + n++));
  return out;
}

// Splits a UTF-8 string into whole code-point substrings.
std::vector<std::string> split_code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

enum class CharClass { Space, Letter, Digit, Other };

CharClass classify(unsigned char c) {
  if (c >= 0x80) return CharClass::Letter;
  if (c == ' ' || (c >= '\t' && c <= '\r') || (c >= 0x1C && c <= 0x1F)) return CharClass::Space;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return CharClass::Letter;
  if (c >= '0' && c <= '9') return CharClass::Digit;
  return CharClass::Other;
}

std::string clean(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (classify(c) == CharClass::Space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

// Pre-tokenizer mirroring the reference pattern:
// specials | 's|'t|'re|'ve|'m|'ll|'d | letters+ | single digit | other+
std::vector<std::string> pre_tokenize(std::string_view s) {
  static constexpr std::array<std::string_view, 7> kContractions = {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    bool matched = false;
    for (std::string_view special : {kSot, kEot}) {
      if (starts_with_ci(s, i, special)) {
        out.emplace_back(s.substr(i, special.size()));
        i += special.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (c == '\'') {
      for (std::string_view k : kContractions) {
        if (starts_with_ci(s, i, k)) {
          out.emplace_back(s.substr(i, k.size()));
          i += k.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    const CharClass cls = classify(c);
    std::size_t j = i + 1;
    switch (cls) {
      case CharClass::Space:
        i = j;
        continue;
      case CharClass::Digit:
        break;
      case CharClass::Letter:
        while (j < s.size() && classify(static_cast<unsigned char>(s[j])) == CharClass::Letter) ++j;
        break;
      case CharClass::Other:
        while (j < s.size() && classify(static_cast<unsigned char>(s[j])) == CharClass::Other) ++j;
        break;
    }
    out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) fail(ErrorCode::BackendLoad, "cannot open tokenizer merges file " + path.string());
  std::string out;
  std::array<char, 1 << 16> buf{};
  int n = 0;
  while ((n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()))) > 0) out.append(buf.data(), n);
  const bool bad = n < 0;
  gzclose(f);
  if (bad) fail(ErrorCode::BackendLoad, "corrupt tokenizer merges file " + path.string());
  return out;
}

}  // namespace

ClipTokenizer ClipTokenizer::from_file(const std::filesystem::path& merges_gz, int context_length) {
  return from_merges(read_gzip(merges_gz), context_length);
}

ClipTokenizer ClipTokenizer::from_merges(std::string_view merges_text, int context_length) {
  require(context_length >= 2, ErrorCode::InvalidArgument, "context length must be at least 2");
  ClipTokenizer tok;
  tok.context_length_ = context_length;

  tok.byte_encoder_.resize(256);
  std::vector<std::string> vocab;
  for (const auto& [b, cp] : byte_code_points()) {
    tok.byte_encoder_[b] = utf8(cp);
    vocab.push_back(utf8(cp));
  }
  const std::size_t base = vocab.size();
  for (std::size_t i = 0; i < base; ++i) vocab.push_back(vocab[i] + "</w>");

  // Split exactly like str.split('\n'): a trailing newline yields a final
  // empty entry.
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0;;) {
    const std::size_t nl = merges_text.find('\n', pos);
    lines.push_back(merges_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  int rank = 0;
  for (std::size_t li = 1; li < lines.size() && rank < kMaxMerges; ++li) {
    const std::string line(lines[li]);
    std::istringstream parts(line);
    std::string a, b, extra;
    if (!(parts >> a)) {
      // Blank lines (such as the one after a trailing newline) still occupy a
      // vocabulary slot in the reference implementation.
      vocab.emplace_back();
      ++rank;
      continue;
    }
    if (!(parts >> b) || (parts >> extra)) fail(ErrorCode::BackendLoad, "malformed merges line: " + line);
    tok.ranks_.emplace(std::make_pair(a, b), rank++);
    vocab.push_back(a + b);
  }
  vocab.emplace_back(kSot);
  vocab.emplace_back(kEot);
  for (std::size_t i = 0; i < vocab.size(); ++i) tok.encoder_[vocab[i]] = static_cast<std::int64_t>(i);
  tok.sot_ = tok.encoder_.at(std::string(kSot));
  tok.eot_ = tok.encoder_.at(std::string(kEot));
  return tok;
}

std::vector<std::string> ClipTokenizer::bpe(const std::string& token) const {
  std::vector<std::string> word = split_code_points(token);
  word.back() += "</w>";
  if (word.size() == 1) return word;
  while (true) {
    int best = std::numeric_limits<int>::max();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      const auto it = ranks_.find({word[i], word[i + 1]});
      if (it != ranks_.end() && it->second < best) {
        best = it->second;
        best_i = i;
      }
    }
    if (best == std::numeric_limits<int>::max()) break;
    const std::string first = word[best_i];
    const std::string second = word[best_i + 1];
    std::vector<std::string> merged;
    merged.reserve(word.size());
    for (std::size_t i = 0; i < word.size();) {
      if (i + 1 < word.size() && word[i] == first && word[i + 1] == second) {
        merged.push_back(first + second);
        i += 2;
      } else {
        merged.push_back(word[i]);
        ++i;
      }
    }
    word = std::move(merged);
    if (word.size() == 1) break;
  }
  return word;
}

std::vector<std::int64_t> ClipTokenizer::encode(std::string_view text) const {
  std::vector<std::int64_t> ids;
  for (const std::string& piece : pre_tokenize(clean(text))) {
    if (piece == kSot || piece == kEot) {
      ids.push_back(encoder_.at(piece));
      continue;
    }
    std::string mapped;
    for (unsigned char b : piece) mapped += byte_encoder_[b];
    for (const std::string& sub : bpe(mapped)) {
      const auto it = encoder_.find(sub);
      require(it != encoder_.end(), ErrorCode::Backend, "token outside vocabulary: " + sub);
      ids.push_back(it->second);
    }
  }
  return ids;
}

std::vector<std::int64_t> ClipTokenizer::tokenize(std::string_view text) const {
  std::vector<std::int64_t> ids{sot_};
  const auto body = encode(text);
  ids.insert(ids.end(), body.begin(), body.end());
  ids.push_back(eot_);
  if (static_cast<int>(ids.size()) > context_length_) {
    ids.resize(context_length_);
    ids.back() = eot_;
  }
  ids.resize(context_length_, 0);
  return ids;
}

}  // namespace anosynth::backends
