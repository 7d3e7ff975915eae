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
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"

namespace dualcan {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kOovId = 1;

struct HyperParams {
  std::size_t embed_dim = 100;             // d
  std::size_t hidden = 100;                // h
  std::size_t max_words = 120;             // M
  std::size_t max_news = 40;               // N
  std::size_t max_entity_sentences = 100;  // E
  std::size_t max_comment_sentences = 100; // U
  std::size_t sentences_per_entity = 4;
  std::size_t sentences_per_comment = 2;
  std::size_t batch_size = 16;
  double learning_rate = 0.001;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;

  static HyperParams gossipcop() { return HyperParams{}; }

  static HyperParams coaid() {
    HyperParams hp;
    hp.max_news = 4;
    hp.max_entity_sentences = 20;
    hp.max_comment_sentences = 20;
    hp.batch_size = 32;
    return hp;
  }

  /// Small dimensions for the generated corpora.
  static HyperParams synthetic() {
    HyperParams hp;
    hp.embed_dim = 16;
    hp.hidden = 8;
    hp.max_words = 12;
    hp.max_news = 4;
    hp.max_entity_sentences = 8;
    hp.max_comment_sentences = 8;
    hp.batch_size = 8;
    hp.learning_rate = 0.005;
    return hp;
  }

  static HyperParams profile(const std::string& name) {
    if (name == "gossipcop") return gossipcop();
    if (name == "coaid") return coaid();
    if (name == "synthetic") return synthetic();
    throw ContractError("unknown profile '" + name + "' (expected gossipcop, coaid or synthetic)");
  }

  void validate() const {
    for (std::size_t v : {embed_dim, hidden, max_words, max_news, max_entity_sentences, max_comment_sentences,
                          sentences_per_entity, sentences_per_comment, batch_size, max_epochs, patience}) {
      if (v == 0) throw ContractError("hyperparameters must all be positive");
    }
    if (!(learning_rate >= 0.0) || !(clip_norm > 0.0)) {
      throw ContractError("learning rate must be >= 0 and clip norm > 0");
    }
  }

  /// Text key/value form used by checkpoints and run logs.
  [[nodiscard]] std::map<std::string, std::string> to_map() const {
    std::map<std::string, std::string> m;
    auto put = [&](const char* k, auto v) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      m[k] = os.str();
    };
    put("embed_dim", embed_dim);
    put("hidden", hidden);
    put("max_words", max_words);
    put("max_news", max_news);
    put("max_entity_sentences", max_entity_sentences);
    put("max_comment_sentences", max_comment_sentences);
    put("sentences_per_entity", sentences_per_entity);
    put("sentences_per_comment", sentences_per_comment);
    put("batch_size", batch_size);
    put("learning_rate", learning_rate);
    put("max_epochs", max_epochs);
    put("patience", patience);
    put("clip_norm", clip_norm);
    put("seed", seed);
    return m;
  }

  /// Overrides fields present in `m`; unknown keys are an error.
  void apply(const std::map<std::string, std::string>& m) {
    for (const auto& [key, text] : m) set(key, text);
  }

  void set(const std::string& key, const std::string& text) {
    auto as_size = [&]() -> std::size_t {
      try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw ContractError("hyperparameter '" + key + "' expects an integer, got '" + text + "'");
      }
    };
    auto as_double = [&]() -> double {
      try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
      } catch (const std::exception&) {
        throw ContractError("hyperparameter '" + key + "' expects a number, got '" + text + "'");
      }
    };
    if (key == "embed_dim") embed_dim = as_size();
    else if (key == "hidden") hidden = as_size();
    else if (key == "max_words") max_words = as_size();
    else if (key == "max_news") max_news = as_size();
    else if (key == "max_entity_sentences") max_entity_sentences = as_size();
    else if (key == "max_comment_sentences") max_comment_sentences = as_size();
    else if (key == "sentences_per_entity") sentences_per_entity = as_size();
    else if (key == "sentences_per_comment") sentences_per_comment = as_size();
    else if (key == "batch_size") batch_size = as_size();
    else if (key == "learning_rate") learning_rate = as_double();
    else if (key == "max_epochs") max_epochs = as_size();
    else if (key == "patience") patience = as_size();
    else if (key == "clip_norm") clip_norm = as_double();
    else if (key == "seed") seed = as_size();
    else throw ContractError("unknown hyperparameter '" + key + "'");
  }

  /// Fields that fix tensor shapes or the padded input layout.
  [[nodiscard]] bool same_architecture(const HyperParams& o) const {
    return embed_dim == o.embed_dim && hidden == o.hidden && max_words == o.max_words &&
           max_news == o.max_news && max_entity_sentences == o.max_entity_sentences &&
           max_comment_sentences == o.max_comment_sentences &&
           sentences_per_entity == o.sentences_per_entity && sentences_per_comment == o.sentences_per_comment;
  }

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Which sources reach the network. A dropped source is replaced by <PAD>.
enum class InputMode { NewsEntities, NewsComments, Full };

inline InputMode parse_mode(const std::string& s) {
  if (s == "N+E") return InputMode::NewsEntities;
  if (s == "N+C") return InputMode::NewsComments;
  if (s == "N+C+E" || s == "N+E+C") return InputMode::Full;
  throw ContractError("unknown input mode '" + s + "' (expected N+E, N+C or N+C+E)");
}

inline std::string to_string(InputMode m) {
  switch (m) {
    case InputMode::NewsEntities: return "N+E";
    case InputMode::NewsComments: return "N+C";
    case InputMode::Full: return "N+C+E";
  }
  return "?";
}

/// One block of padded sentences: rows x max_words ids, row-major, plus a
/// per-sentence mask marking real sentences.
struct SentenceBlock {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> ids;
  std::vector<bool> mask;

  SentenceBlock() = default;
  SentenceBlock(std::size_t r, std::size_t w) : rows(r), width(w), ids(r * w, kPadId), mask(r, false) {}

  [[nodiscard]] TokenId at(std::size_t r, std::size_t c) const { return ids[r * width + c]; }
  TokenId& at(std::size_t r, std::size_t c) { return ids[r * width + c]; }

  [[nodiscard]] std::size_t real_count() const {
    std::size_t n = 0;
    for (bool b : mask) n += b ? 1 : 0;
    return n;
  }

  /// Non-pad token ids of one row, in order.
  [[nodiscard]] std::vector<TokenId> tokens(std::size_t r) const {
    std::vector<TokenId> out;
    for (std::size_t c = 0; c < width; ++c) {
      if (at(r, c) != kPadId) out.push_back(at(r, c));
    }
    return out;
  }

  /// Replaces every token with <PAD> and clears the mask.
  void blank() {
    for (TokenId& t : ids) t = kPadId;
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = false;
  }

  friend bool operator==(const SentenceBlock&, const SentenceBlock&) = default;
};

/// A document after vocabulary lookup, truncation and padding.
struct EncodedDocument {
  std::string id;
  int label = 0;  // 1 = fake
  SentenceBlock news;      // N x M
  SentenceBlock entities;  // E x M
  SentenceBlock comments;  // U x M

  friend bool operator==(const EncodedDocument&, const EncodedDocument&) = default;
};

}  // namespace dualcan
