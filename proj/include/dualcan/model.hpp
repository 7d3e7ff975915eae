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

// The dual co-attention network.
//
//   news      -> word BiGRU + attention per sentence -> sentence BiGRU -> S
//   entities  -> word BiGRU + attention per sentence                   -> D
//   comments  -> word BiGRU + attention per sentence                   -> C
//   co_attention(S, D) -> s1^, d^      co_attention(S, C) -> s2^, c^
//   logits = W_2 (W_1 [s1^, d^, s2^, c^] + b_1) + b_2
//
// Padding: only non-pad words of a sentence enter its BiGRU, and pad
// sentences are zero columns that the co-attention softmax masks out. A side
// with no real sentence at all attends uniformly over its zero columns, so
// its pooled vector is zero.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/graph.hpp"
#include "dualcan/layers.hpp"
#include "dualcan/tensor.hpp"
#include "dualcan/types.hpp"

namespace dualcan {

struct SentenceEncoderParams {
  GruParams fwd;
  GruParams bwd;
  WordAttentionParams attention;

  SentenceEncoderParams() = default;
  SentenceEncoderParams(const std::string& name, std::size_t d, std::size_t h)
      : fwd(name + ".gru_fwd", d, h), bwd(name + ".gru_bwd", d, h), attention(name + ".attention", h) {}

  void collect(std::vector<Parameter*>& out) {
    fwd.collect(out);
    bwd.collect(out);
    attention.collect(out);
  }

  void init(std::mt19937_64& rng) {
    fwd.init(rng);
    bwd.init(rng);
    attention.init(rng);
  }
};

/// Every learnable tensor of the network. Encoders do not share weights.
struct ModelParams {
  std::size_t embed_dim = 0;
  std::size_t hidden = 0;
  SentenceEncoderParams news_words;
  GruParams news_sentences_fwd;
  GruParams news_sentences_bwd;
  SentenceEncoderParams entity_words;
  SentenceEncoderParams comment_words;
  CoAttentionParams entity_coattention;
  CoAttentionParams comment_coattention;
  LinearParams head_hidden;  // [2h x 8h]
  LinearParams head_output;  // [2 x 2h]

  ModelParams() = default;
  ModelParams(std::size_t d, std::size_t h)
      : embed_dim(d),
        hidden(h),
        news_words("news.words", d, h),
        news_sentences_fwd("news.sentences.gru_fwd", 2 * h, h),
        news_sentences_bwd("news.sentences.gru_bwd", 2 * h, h),
        entity_words("entity.words", d, h),
        comment_words("comment.words", d, h),
        entity_coattention("entity.coattention", 2 * h),
        comment_coattention("comment.coattention", 2 * h),
        head_hidden("head.hidden", 8 * h, 2 * h),
        head_output("head.output", 2 * h, 2) {}

  static ModelParams initialized(std::size_t d, std::size_t h, std::uint64_t seed) {
    ModelParams p(d, h);
    std::mt19937_64 rng(seed);
    p.news_words.init(rng);
    p.news_sentences_fwd.init(rng);
    p.news_sentences_bwd.init(rng);
    p.entity_words.init(rng);
    p.comment_words.init(rng);
    p.entity_coattention.init(rng);
    p.comment_coattention.init(rng);
    p.head_hidden.init(rng);
    p.head_output.init(rng);
    return p;
  }

  /// Stable enumeration order; names are unique.
  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    news_words.collect(out);
    news_sentences_fwd.collect(out);
    news_sentences_bwd.collect(out);
    entity_words.collect(out);
    comment_words.collect(out);
    entity_coattention.collect(out);
    comment_coattention.collect(out);
    head_hidden.collect(out);
    head_output.collect(out);
    return out;
  }

  std::vector<const Parameter*> parameters() const {
    std::vector<const Parameter*> out;
    for (Parameter* p : const_cast<ModelParams*>(this)->parameters()) out.push_back(p);
    return out;
  }

  void zero_grad() {
    for (Parameter* p : parameters()) p->zero_grad();
  }

  [[nodiscard]] std::size_t count() const {
    std::size_t n = 0;
    for (const Parameter* p : parameters()) n += p->value.size();
    return n;
  }
};

// ---------------------------------------------------------------------------
// Encoders

struct EncodedSide {
  Var states;              // [2h x rows]
  std::vector<bool> mask;  // real sentence positions
};

namespace detail {

/// Embedding columns [d x L] for the non-pad tokens of one sentence row.
inline Tensor embed_tokens(const Tensor& embeddings, std::span<const TokenId> tokens) {
  const std::size_t d = embeddings.cols();
  Tensor x(Shape{d, tokens.size()});
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto id = static_cast<std::size_t>(tokens[t]);
    if (id >= embeddings.rows()) {
      throw DataError("token id " + std::to_string(id) + " outside embedding table of " +
                      std::to_string(embeddings.rows()) + " rows");
    }
    for (std::size_t k = 0; k < d; ++k) x(k, t) = embeddings(id, k);
  }
  return x;
}

/// Places the columns of `real` at `positions` inside a [rows x total]
/// matrix whose remaining columns are zero.
inline Var scatter_columns(Graph& g, Var real, std::span<const std::size_t> positions, std::size_t total) {
  const std::size_t rows = g.shape(real).rows;
  if (positions.size() == total) return real;
  std::vector<Var> parts;
  std::size_t next = 0;  // next output column to fill
  std::size_t k = 0;     // next real column
  while (next < total) {
    if (k < positions.size() && positions[k] == next) {
      std::size_t run = 1;
      while (k + run < positions.size() && positions[k + run] == next + run) ++run;
      parts.push_back(g.slice(real, Axis::Cols, k, run));
      k += run;
      next += run;
    } else {
      const std::size_t stop = k < positions.size() ? positions[k] : total;
      parts.push_back(g.constant(Tensor::zeros(rows, stop - next)));
      next = stop;
    }
  }
  return parts.size() == 1 ? parts.front() : g.concat(parts, Axis::Cols);
}

/// Sentence vectors v' for the real rows of a block, as [2h x k] plus the
/// row positions they came from. A row is real when its mask is set and it
/// holds at least one non-pad token.
inline std::pair<Var, std::vector<std::size_t>> encode_sentences(Graph& g, const SentenceBlock& block,
                                                                 const Tensor& embeddings,
                                                                 SentenceEncoderParams& p) {
  std::vector<Var> vectors;
  std::vector<std::size_t> positions;
  for (std::size_t r = 0; r < block.rows; ++r) {
    if (!block.mask[r]) continue;
    const std::vector<TokenId> tokens = block.tokens(r);
    if (tokens.empty()) continue;
    const Var x = g.constant(embed_tokens(embeddings, tokens));
    const Var states = bigru(g, x, p.fwd, p.bwd);
    vectors.push_back(word_attention(g, states, {}, p.attention).pooled);
    positions.push_back(r);
  }
  if (vectors.empty()) return {Var{}, {}};
  return {g.concat(vectors, Axis::Cols), positions};
}

}  // namespace detail

/// News encoder: word-level attention per sentence, then a sentence-level
/// BiGRU over the real sentences. Pad sentence columns are zero.
inline EncodedSide encode_news(Graph& g, const SentenceBlock& news, const Tensor& embeddings, ModelParams& p) {
  auto [vectors, positions] = detail::encode_sentences(g, news, embeddings, p.news_words);
  if (positions.empty()) throw DataError("document has no real news sentence");
  const Var contextual = bigru(g, vectors, p.news_sentences_fwd, p.news_sentences_bwd);
  EncodedSide out;
  out.states = detail::scatter_columns(g, contextual, positions, news.rows);
  out.mask.assign(news.rows, false);
  for (std::size_t r : positions) out.mask[r] = true;
  return out;
}

/// Entity-description or comment encoder: word-level attention only.
inline EncodedSide encode_side(Graph& g, const SentenceBlock& block, const Tensor& embeddings,
                               SentenceEncoderParams& p) {
  auto [vectors, positions] = detail::encode_sentences(g, block, embeddings, p);
  EncodedSide out;
  out.mask.assign(block.rows, false);
  for (std::size_t r : positions) out.mask[r] = true;
  if (positions.empty()) {
    out.states = g.constant(Tensor::zeros(2 * p.attention.hidden, block.rows));
  } else {
    out.states = detail::scatter_columns(g, vectors, positions, block.rows);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward pass

struct ForwardPass {
  Var logits;         // [2 x 1]
  Var probabilities;  // [1 x 2]
  CoAttentionOutput entity;
  CoAttentionOutput comment;
  std::vector<bool> news_mask;
  std::vector<bool> entity_mask;
  std::vector<bool> comment_mask;
};

namespace detail {

// Attention masks are bool spans, which std::vector<bool> cannot provide.
class MaskArray {
 public:
  explicit MaskArray(const std::vector<bool>& mask) : size_(mask.size()), data_(new bool[mask.size()]) {
    for (std::size_t i = 0; i < size_; ++i) {
      data_[i] = mask[i];
      any_ = any_ || mask[i];
    }
  }

  /// The mask, or an empty span (no masking) when nothing is real.
  [[nodiscard]] std::span<const bool> or_uniform() const {
    return any_ ? std::span<const bool>(data_.get(), size_) : std::span<const bool>();
  }

 private:
  std::size_t size_;
  bool any_ = false;
  std::unique_ptr<bool[]> data_;
};

}  // namespace detail

inline ForwardPass forward(Graph& g, const EncodedDocument& doc, const Tensor& embeddings, ModelParams& p) {
  if (embeddings.cols() != p.embed_dim) {
    throw ShapeError("embedding width " + std::to_string(embeddings.cols()) + " does not match model d = " +
                     std::to_string(p.embed_dim));
  }
  const EncodedSide news = encode_news(g, doc.news, embeddings, p);
  const EncodedSide entities = encode_side(g, doc.entities, embeddings, p.entity_words);
  const EncodedSide comments = encode_side(g, doc.comments, embeddings, p.comment_words);

  const detail::MaskArray news_mask_array(news.mask);
  const detail::MaskArray entity_mask_array(entities.mask);
  const detail::MaskArray comment_mask_array(comments.mask);
  const auto news_mask = news_mask_array.or_uniform();
  const auto entity_mask = entity_mask_array.or_uniform();
  const auto comment_mask = comment_mask_array.or_uniform();

  ForwardPass out;
  out.entity = co_attention(g, news.states, entities.states, news_mask, entity_mask, p.entity_coattention);
  out.comment = co_attention(g, news.states, comments.states, news_mask, comment_mask, p.comment_coattention);

  const Var features = g.concat({out.entity.primary_pooled, out.entity.secondary_pooled,
                                 out.comment.primary_pooled, out.comment.secondary_pooled},
                                Axis::Cols);
  const Var hidden = linear(g, g.transpose(features), p.head_hidden);
  out.logits = linear(g, hidden, p.head_output);
  out.probabilities = g.softmax_row(g.transpose(out.logits));
  out.news_mask = news.mask;
  out.entity_mask = entities.mask;
  out.comment_mask = comments.mask;
  return out;
}

inline constexpr double kLogFloor = 1e-12;

/// Cross entropy -y log p_1 - (1 - y) log p_0 on softmax probabilities.
inline Var cross_entropy(Graph& g, Var probabilities, int label) {
  if (label != 0 && label != 1) throw ContractError("label must be 0 or 1");
  const Var picked = g.slice(probabilities, Axis::Cols, static_cast<std::size_t>(label), 1);
  return g.scale(g.log(picked, kLogFloor), -1.0);
}

/// Cross entropy straight from a [2 x 1] logits column.
inline Var loss_from_logits(Graph& g, Var logits, int label) {
  return cross_entropy(g, g.softmax_row(g.transpose(logits)), label);
}

// ---------------------------------------------------------------------------
// Ablation and inference

/// Replaces the dropped source with <PAD> tokens; the architecture is
/// unchanged.
inline EncodedDocument ablate(EncodedDocument doc, InputMode mode) {
  if (mode == InputMode::NewsComments) doc.entities.blank();
  if (mode == InputMode::NewsEntities) doc.comments.blank();
  return doc;
}

/// Attention weights of one forward pass, as plain values.
struct AttentionReport {
  std::vector<double> news_entity;     // a_s1 [N]
  std::vector<double> entity;          // a_d  [E]
  std::vector<double> news_comment;    // a_s2 [N]
  std::vector<double> comment;         // a_c  [U]
  std::vector<bool> news_mask;
  std::vector<bool> entity_mask;
  std::vector<bool> comment_mask;
};

struct Prediction {
  std::array<double, 2> logits{};
  std::array<double, 2> probabilities{};
  int label = 0;  // argmax; exact ties go to 0 (real)
  AttentionReport attention;
};

inline std::vector<double> row_values(const Graph& g, Var v) {
  const Tensor& t = g.value(v);
  return {t.data().begin(), t.data().end()};
}

inline Prediction predict(const EncodedDocument& doc, const Tensor& embeddings, ModelParams& p) {
  Graph g(/*check_finite=*/true);
  const ForwardPass f = forward(g, doc, embeddings, p);
  Prediction out;
  const Tensor& logits = g.value(f.logits);
  const Tensor& probs = g.value(f.probabilities);
  out.logits = {logits[0], logits[1]};
  out.probabilities = {probs[0], probs[1]};
  out.label = probs[1] > probs[0] ? 1 : 0;
  out.attention.news_entity = row_values(g, f.entity.primary_weights);
  out.attention.entity = row_values(g, f.entity.secondary_weights);
  out.attention.news_comment = row_values(g, f.comment.primary_weights);
  out.attention.comment = row_values(g, f.comment.secondary_weights);
  out.attention.news_mask = f.news_mask;
  out.attention.entity_mask = f.entity_mask;
  out.attention.comment_mask = f.comment_mask;
  return out;
}

}  // namespace dualcan
