// Copyright 2026 The Dual-CAN Authors
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

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace dualcan {

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Bytes >= 0x80 count as word characters so UTF-8 text stays in one token.
inline bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Splits after '.', '!' or '?' when followed by whitespace or the end of
/// the text. No abbreviation handling. Segments are trimmed; empty ones are
/// dropped.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < text.size() && !detail::is_space(text[i + 1])) continue;
    const std::string_view seg = detail::trim(text.substr(start, i + 1 - start));
    if (!seg.empty()) out.emplace_back(seg);
    start = i + 1;
  }
  if (start < text.size()) {
    const std::string_view seg = detail::trim(text.substr(start));
    if (!seg.empty()) out.emplace_back(seg);
  }
  return out;
}

/// Lowercases, splits on whitespace, and emits every punctuation character
/// as its own token.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (char c : sentence) {
    if (detail::is_space(c)) {
      flush();
    } else if (detail::is_word_char(c)) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
      out.emplace_back(1, c);
    }
  }
  flush();
  return out;
}

/// split_sentences followed by tokenize; sentences without tokens vanish.
inline std::vector<std::vector<std::string>> tokenize_text(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (const std::string& s : split_sentences(text)) {
    auto tokens = tokenize(s);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace dualcan
