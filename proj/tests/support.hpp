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

// Test support: plain nested-vector reimplementations of every layer, written
// index by index without the autodiff graph, plus random instance builders.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dualcan/dataset.hpp"
#include "dualcan/embeddings.hpp"
#include "dualcan/entities.hpp"
#include "dualcan/layers.hpp"
#include "dualcan/model.hpp"
#include "dualcan/synthetic.hpp"
#include "dualcan/tensor.hpp"
#include "dualcan/types.hpp"

namespace dualcan::testing {

using Mat = std::vector<std::vector<double>>;  // [row][col]
using Vec = std::vector<double>;

inline Mat to_mat(const Tensor& t) {
  Mat m(t.rows(), Vec(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  }
  return m;
}

inline Tensor to_tensor(const Mat& m) {
  Tensor t(Shape{m.size(), m.empty() ? 0 : m[0].size()});
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m[r].size(); ++c) t(r, c) = m[r][c];
  }
  return t;
}

inline Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(Shape{rows, cols});
  for (double& v : t.data()) v = u(rng);
  return t;
}

inline void randomize(std::vector<Parameter*> params, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Parameter* p : params) {
    for (double& v : p->value.data()) v = u(rng);
  }
}

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Mat out(n, Vec(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i][t] * b[t][j];
      out[i][j] = s;
    }
  }
  return out;
}

inline Mat column_of(const Mat& a, std::size_t c) {
  Mat out(a.size(), Vec(1));
  for (std::size_t r = 0; r < a.size(); ++r) out[r][0] = a[r][c];
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Softmax over the positions with mask[i] true (all when mask is empty);
/// masked positions get exactly 0.
inline Vec masked_softmax(const Vec& x, const std::vector<bool>& mask) {
  auto live = [&](std::size_t i) { return mask.empty() || mask[i]; };
  double peak = -INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (live(i)) peak = std::max(peak, x[i]);
  }
  Vec out(x.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (live(i)) {
      out[i] = std::exp(x[i] - peak);
      total += out[i];
    }
  }
  for (double& v : out) v /= total;
  return out;
}

/// One GRU step written out per component.
inline Vec gru_step(const GruParams& p, const Vec& x, const Vec& h) {
  const std::size_t H = p.hidden, I = p.input;
  Vec r(H), z(H), out(H);
  for (std::size_t i = 0; i < H; ++i) {
    double ar = p.b_r.value[i], az = p.b_z.value[i];
    for (std::size_t k = 0; k < I; ++k) {
      ar += p.w_r.value(i, k) * x[k];
      az += p.w_z.value(i, k) * x[k];
    }
    for (std::size_t k = 0; k < H; ++k) {
      ar += p.u_r.value(i, k) * h[k];
      az += p.u_z.value(i, k) * h[k];
    }
    r[i] = sigmoid(ar);
    z[i] = sigmoid(az);
  }
  for (std::size_t i = 0; i < H; ++i) {
    double ac = p.b_h.value[i];
    for (std::size_t k = 0; k < I; ++k) ac += p.w_h.value(i, k) * x[k];
    for (std::size_t k = 0; k < H; ++k) ac += p.u_h.value(i, k) * (r[k] * h[k]);
    const double cand = std::tanh(ac);
    out[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
  }
  return out;
}

/// States [h x T] of one direction over the columns of `x` [in x T].
inline Mat gru_run(const GruParams& p, const Mat& x, bool reverse) {
  const std::size_t T = x.empty() ? 0 : x[0].size();
  Mat out(p.hidden, Vec(T));
  Vec h(p.hidden, 0.0);
  for (std::size_t k = 0; k < T; ++k) {
    const std::size_t t = reverse ? T - 1 - k : k;
    Vec col(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) col[i] = x[i][t];
    h = gru_step(p, col, h);
    for (std::size_t i = 0; i < p.hidden; ++i) out[i][t] = h[i];
  }
  return out;
}

inline Mat bigru_run(const GruParams& fwd, const GruParams& bwd, const Mat& x) {
  Mat f = gru_run(fwd, x, false);
  const Mat b = gru_run(bwd, x, true);
  f.insert(f.end(), b.begin(), b.end());
  return f;
}

struct WordAttentionResult {
  Vec alpha;
  Vec pooled;
};

inline WordAttentionResult word_attention_run(const WordAttentionParams& p, const Mat& v,
                                              const std::vector<bool>& mask) {
  const std::size_t rows = v.size(), T = v[0].size(), H = p.hidden;
  Vec scores(T);
  for (std::size_t t = 0; t < T; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < H; ++i) {
      double k = p.bias.value[i];
      for (std::size_t j = 0; j < rows; ++j) k += p.proj.value(i, j) * v[j][t];
      s += p.query.value[i] * std::tanh(k);
    }
    scores[t] = s;
  }
  WordAttentionResult out;
  out.alpha = masked_softmax(scores, mask);
  out.pooled.assign(rows, 0.0);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t t = 0; t < T; ++t) out.pooled[j] += out.alpha[t] * v[j][t];
  }
  return out;
}

struct CoAttentionResult {
  Mat affinity;       // [E x N]
  Mat primary_map;    // [2h x N]
  Mat secondary_map;  // [2h x E]
  Vec a_s, a_d;
  Vec s_hat, d_hat;
};

/// Affinity, interaction maps, weights and pooled vectors, each entry
/// summed out explicitly.
inline CoAttentionResult co_attention_run(const CoAttentionParams& p, const Mat& S, const Mat& D,
                                          const std::vector<bool>& mask_s, const std::vector<bool>& mask_d) {
  const std::size_t K = p.width, N = S[0].size(), E = D[0].size();
  const Tensor& Wr = p.w_r.value;
  const Tensor& Ws = p.w_s.value;
  const Tensor& Wd = p.w_d.value;
  CoAttentionResult o;
  o.affinity.assign(E, Vec(N));
  for (std::size_t i = 0; i < E; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) acc += D[a][i] * Wr(a, b) * S[b][j];
      }
      o.affinity[i][j] = std::tanh(acc);
    }
  }
  Mat ws_s(K, Vec(N, 0.0)), wd_d(K, Vec(E, 0.0));
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < K; ++b) {
      for (std::size_t j = 0; j < N; ++j) ws_s[a][j] += Ws(a, b) * S[b][j];
      for (std::size_t i = 0; i < E; ++i) wd_d[a][i] += Wd(a, b) * D[b][i];
    }
  }
  o.primary_map.assign(K, Vec(N));
  o.secondary_map.assign(K, Vec(E));
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t j = 0; j < N; ++j) {
      double acc = ws_s[a][j];
      for (std::size_t i = 0; i < E; ++i) acc += wd_d[a][i] * o.affinity[i][j];
      o.primary_map[a][j] = std::tanh(acc);
    }
    for (std::size_t i = 0; i < E; ++i) {
      double acc = wd_d[a][i];
      for (std::size_t j = 0; j < N; ++j) acc += ws_s[a][j] * o.affinity[i][j];
      o.secondary_map[a][i] = std::tanh(acc);
    }
  }
  Vec score_s(N, 0.0), score_d(E, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t a = 0; a < K; ++a) score_s[j] += p.w_hs.value[a] * o.primary_map[a][j];
  }
  for (std::size_t i = 0; i < E; ++i) {
    for (std::size_t a = 0; a < K; ++a) score_d[i] += p.w_hd.value[a] * o.secondary_map[a][i];
  }
  o.a_s = masked_softmax(score_s, mask_s);
  o.a_d = masked_softmax(score_d, mask_d);
  o.s_hat.assign(K, 0.0);
  o.d_hat.assign(K, 0.0);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t j = 0; j < N; ++j) o.s_hat[a] += o.a_s[j] * S[a][j];
    for (std::size_t i = 0; i < E; ++i) o.d_hat[a] += o.a_d[i] * D[a][i];
  }
  return o;
}

// ---------------------------------------------------------------------------
// Whole-model oracle

struct SideResult {
  Mat states;  // [2h x rows]
  std::vector<bool> mask;
};

inline Mat embed_run(const Tensor& embeddings, const std::vector<TokenId>& tokens) {
  Mat x(embeddings.cols(), Vec(tokens.size()));
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    for (std::size_t k = 0; k < embeddings.cols(); ++k) x[k][t] = embeddings(static_cast<std::size_t>(tokens[t]), k);
  }
  return x;
}

inline SideResult side_run(const SentenceBlock& block, const Tensor& embeddings, const SentenceEncoderParams& p,
                           const GruParams* sent_fwd = nullptr, const GruParams* sent_bwd = nullptr) {
  const std::size_t width = 2 * p.attention.hidden;
  std::vector<Vec> vectors;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < block.rows; ++r) {
    const std::vector<TokenId> tokens = block.tokens(r);
    if (!block.mask[r] || tokens.empty()) continue;
    const Mat v = bigru_run(p.fwd, p.bwd, embed_run(embeddings, tokens));
    vectors.push_back(word_attention_run(p.attention, v, {}).pooled);
    rows.push_back(r);
  }
  SideResult out;
  out.states.assign(width, Vec(block.rows, 0.0));
  out.mask.assign(block.rows, false);
  if (vectors.empty()) return out;
  Mat stacked(width, Vec(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    for (std::size_t i = 0; i < width; ++i) stacked[i][k] = vectors[k][i];
  }
  if (sent_fwd != nullptr) stacked = bigru_run(*sent_fwd, *sent_bwd, stacked);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.mask[rows[k]] = true;
    for (std::size_t i = 0; i < width; ++i) out.states[i][rows[k]] = stacked[i][k];
  }
  return out;
}

struct ModelResult {
  Vec logits;
  CoAttentionResult entity, comment;
};

inline std::vector<bool> or_uniform(const std::vector<bool>& mask) {
  return std::find(mask.begin(), mask.end(), true) == mask.end() ? std::vector<bool>{} : mask;
}

inline ModelResult model_run(const EncodedDocument& doc, const Tensor& embeddings, const ModelParams& p) {
  const SideResult news = side_run(doc.news, embeddings, p.news_words, &p.news_sentences_fwd, &p.news_sentences_bwd);
  const SideResult ent = side_run(doc.entities, embeddings, p.entity_words);
  const SideResult com = side_run(doc.comments, embeddings, p.comment_words);
  ModelResult out;
  out.entity = co_attention_run(p.entity_coattention, news.states, ent.states, news.mask, or_uniform(ent.mask));
  out.comment = co_attention_run(p.comment_coattention, news.states, com.states, news.mask, or_uniform(com.mask));
  Vec f;
  for (const Vec* part : {&out.entity.s_hat, &out.entity.d_hat, &out.comment.s_hat, &out.comment.d_hat}) {
    f.insert(f.end(), part->begin(), part->end());
  }
  const LinearParams& l1 = p.head_hidden;
  const LinearParams& l2 = p.head_output;
  Vec hidden(l1.out);
  for (std::size_t i = 0; i < l1.out; ++i) {
    hidden[i] = l1.bias.value[i];
    for (std::size_t k = 0; k < l1.in; ++k) hidden[i] += l1.weight.value(i, k) * f[k];
  }
  out.logits.assign(2, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    out.logits[i] = l2.bias.value[i];
    for (std::size_t k = 0; k < l2.in; ++k) out.logits[i] += l2.weight.value(i, k) * hidden[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

inline HyperParams tiny_hyper() {
  HyperParams hp = HyperParams::synthetic();
  hp.embed_dim = 3;
  hp.hidden = 2;
  hp.max_words = 3;
  hp.max_news = 2;
  hp.max_entity_sentences = 2;
  hp.max_comment_sentences = 2;
  return hp;
}

/// Embedding table with zero <PAD>/<OOV> rows.
inline Tensor random_embeddings(std::size_t vocab, std::size_t d, std::mt19937_64& rng) {
  Tensor t = random_tensor(vocab, d, rng);
  for (std::size_t k = 0; k < d; ++k) t(0, k) = t(1, k) = 0.0;
  return t;
}

/// Between `min_real` and rows real sentences, each of 1..width tokens
/// drawn from [1, vocab).
inline SentenceBlock random_block(std::size_t rows, std::size_t width, std::size_t vocab, std::size_t min_real,
                                  std::mt19937_64& rng) {
  SentenceBlock b(rows, width);
  const std::size_t real = min_real + static_cast<std::size_t>(rng() % (rows - min_real + 1));
  for (std::size_t r = 0; r < real; ++r) {
    const std::size_t len = 1 + static_cast<std::size_t>(rng() % width);
    for (std::size_t c = 0; c < len; ++c) b.at(r, c) = static_cast<TokenId>(1 + rng() % (vocab - 1));
    b.mask[r] = true;
  }
  return b;
}

inline EncodedDocument random_document(const HyperParams& hp, std::size_t vocab, std::mt19937_64& rng,
                                       std::size_t min_side = 0) {
  EncodedDocument d;
  d.id = "doc";
  d.label = static_cast<int>(rng() % 2);
  d.news = random_block(hp.max_news, hp.max_words, vocab, 1, rng);
  d.entities = random_block(hp.max_entity_sentences, hp.max_words, vocab, min_side, rng);
  d.comments = random_block(hp.max_comment_sentences, hp.max_words, vocab, min_side, rng);
  return d;
}

inline std::vector<double> logits_of(const EncodedDocument& doc, const Tensor& emb, ModelParams& p) {
  const Prediction pr = predict(doc, emb, p);
  return {pr.logits[0], pr.logits[1]};
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, max_abs_diff(a[i], b[i]));
  return worst;
}

inline double max_abs_diff(const Tensor& a, const Mat& b) { return max_abs_diff(to_mat(a), b); }

inline Vec values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dualcan-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// A generated corpus parsed in memory, with entity descriptions attached.
struct LoadedCorpus {
  std::vector<Document> documents;
  Vocabulary vocab;
  Tensor embeddings;
};

inline LoadedCorpus load_corpus(const SyntheticSpec& spec) {
  const SyntheticCorpus raw = gen_synthetic(spec);
  LoadedCorpus c;
  std::istringstream dataset(raw.dataset);
  c.documents = read_dataset(dataset).documents;
  std::istringstream snapshot(raw.snapshot);
  attach_descriptions(c.documents, SnapshotResolver::load(snapshot));
  c.vocab = build_vocabulary(c.documents);
  std::istringstream vectors(raw.embeddings);
  c.embeddings = load_embeddings(vectors, c.vocab, spec.embed_dim);
  return c;
}

}  // namespace dualcan::testing
