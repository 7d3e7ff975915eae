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

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/types.hpp"

namespace dualcan {

/// Token <-> id map. Id 0 is <PAD>, id 1 is <OOV>; corpus tokens start at 2
/// in insertion order.
class Vocabulary {
 public:
  static constexpr const char* kPadToken = "<PAD>";
  static constexpr const char* kOovToken = "<OOV>";

  Vocabulary() : tokens_{kPadToken, kOovToken} {}

  /// Adds a token if new; returns its id.
  TokenId add(const std::string& token) {
    if (token == kPadToken || token == kOovToken) throw DataError("reserved token '" + token + "' in corpus");
    if (token.empty()) throw DataError("empty token");
    if (auto it = ids_.find(token); it != ids_.end()) return it->second;
    const auto id = static_cast<TokenId>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
  }

  [[nodiscard]] TokenId id(const std::string& token) const {
    const auto it = ids_.find(token);
    return it == ids_.end() ? kOovId : it->second;
  }

  [[nodiscard]] bool contains(const std::string& token) const { return ids_.count(token) != 0; }

  [[nodiscard]] const std::string& token(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
      throw DataError("token id " + std::to_string(id) + " outside vocabulary");
    }
    return tokens_[static_cast<std::size_t>(id)];
  }

  [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }

  /// Corpus tokens in id order (ids 2, 3, ...).
  [[nodiscard]] std::vector<std::string> corpus_tokens() const { return {tokens_.begin() + 2, tokens_.end()}; }

  static Vocabulary from_tokens(const std::vector<std::string>& corpus_tokens) {
    Vocabulary v;
    for (const auto& t : corpus_tokens) {
      if (v.contains(t)) throw DataError("duplicate vocabulary token '" + t + "'");
      v.add(t);
    }
    return v;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace dualcan
