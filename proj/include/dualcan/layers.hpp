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

// Building blocks of the network, written against the Graph tape.
//
// Conventions: feature vectors are columns, so a sequence of T vectors of
// width n is an [n x T] matrix. Attention distributions are [1 x T] rows.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/graph.hpp"
#include "dualcan/tensor.hpp"

namespace dualcan {

/// Uniform draw in [0, 1) straight from the engine bits, so results do not
/// depend on the standard library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fills with uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)).
inline void init_uniform(Parameter& p, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : p.value.data()) v = (2.0 * unit_uniform(rng) - 1.0) * bound;
}

inline Parameter make_param(const std::string& name, std::size_t rows, std::size_t cols) {
  return Parameter(name, Tensor::zeros(rows, cols));
}

// ---------------------------------------------------------------------------
// GRU

struct GruParams {
  std::size_t input = 0;
  std::size_t hidden = 0;
  // reset gate, update gate, candidate state
  Parameter w_r, u_r, b_r;
  Parameter w_z, u_z, b_z;
  Parameter w_h, u_h, b_h;

  GruParams() = default;
  GruParams(const std::string& name, std::size_t in, std::size_t h)
      : input(in),
        hidden(h),
        w_r(make_param(name + ".W_r", h, in)),
        u_r(make_param(name + ".U_r", h, h)),
        b_r(make_param(name + ".b_r", h, 1)),
        w_z(make_param(name + ".W_z", h, in)),
        u_z(make_param(name + ".U_z", h, h)),
        b_z(make_param(name + ".b_z", h, 1)),
        w_h(make_param(name + ".W_h", h, in)),
        u_h(make_param(name + ".U_h", h, h)),
        b_h(make_param(name + ".b_h", h, 1)) {}

  void collect(std::vector<Parameter*>& out) {
    for (Parameter* p : {&w_r, &u_r, &b_r, &w_z, &u_z, &b_z, &w_h, &u_h, &b_h}) out.push_back(p);
  }

  void init(std::mt19937_64& rng) {
    for (Parameter* p : {&w_r, &w_z, &w_h}) init_uniform(*p, input, rng);
    for (Parameter* p : {&u_r, &u_z, &u_h}) init_uniform(*p, hidden, rng);
  }
};

/// One GRU step. `x` is [in x B], `h_prev` is [h x B]; columns are
/// independent sequences.
///   r  = sigmoid(W_r x + U_r h_prev + b_r)
///   z  = sigmoid(W_z x + U_z h_prev + b_z)
///   h~ = tanh(W_h x + U_h (r * h_prev) + b_h)
///   h  = (1 - z) * h_prev + z * h~
inline Var gru_cell(Graph& g, Var x, Var h_prev, GruParams& p) {
  if (g.shape(x).rows != p.input || g.shape(h_prev).rows != p.hidden ||
      g.shape(x).cols != g.shape(h_prev).cols) {
    throw ShapeError("gru_cell: input " + g.shape(x).str() + " / state " + g.shape(h_prev).str() +
                     " inconsistent with GRU(" + std::to_string(p.input) + " -> " +
                     std::to_string(p.hidden) + ")");
  }
  const Var r = g.sigmoid(g.add(g.add(g.matmul(g.param(p.w_r), x), g.matmul(g.param(p.u_r), h_prev)),
                                g.param(p.b_r)));
  const Var z = g.sigmoid(g.add(g.add(g.matmul(g.param(p.w_z), x), g.matmul(g.param(p.u_z), h_prev)),
                                g.param(p.b_z)));
  const Var cand = g.tanh(g.add(
      g.add(g.matmul(g.param(p.w_h), x), g.matmul(g.param(p.u_h), g.mul(r, h_prev))), g.param(p.b_h)));
  // (1 - z) * h_prev + z * h~, rearranged to h_prev + z * (h~ - h_prev)
  return g.add(h_prev, g.mul(z, g.sub(cand, h_prev)));
}

namespace detail {

// Runs one direction over the columns of `seq`. Input projections for every
// step are computed with one product per gate up front.
inline std::vector<Var> gru_scan(Graph& g, Var seq, GruParams& p, bool reverse) {
  const std::size_t steps = g.shape(seq).cols;
  const Var xr = g.add(g.matmul(g.param(p.w_r), seq), g.param(p.b_r));
  const Var xz = g.add(g.matmul(g.param(p.w_z), seq), g.param(p.b_z));
  const Var xh = g.add(g.matmul(g.param(p.w_h), seq), g.param(p.b_h));
  const Var u_r = g.param(p.u_r);
  const Var u_z = g.param(p.u_z);
  const Var u_h = g.param(p.u_h);

  std::vector<Var> states(steps);
  Var h = g.constant(Tensor::zeros(p.hidden, 1));
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    const Var r = g.sigmoid(g.add(g.slice(xr, Axis::Cols, t, 1), g.matmul(u_r, h)));
    const Var z = g.sigmoid(g.add(g.slice(xz, Axis::Cols, t, 1), g.matmul(u_z, h)));
    const Var cand = g.tanh(g.add(g.slice(xh, Axis::Cols, t, 1), g.matmul(u_h, g.mul(r, h))));
    h = g.add(h, g.mul(z, g.sub(cand, h)));
    states[t] = h;
  }
  return states;
}

}  // namespace detail

/// Bidirectional GRU over the columns of `seq` [in x T]. Column t of the
/// [2h x T] result stacks the forward state after steps 1..t on top of the
/// backward state after steps T..t. Both directions start from zero.
inline Var bigru(Graph& g, Var seq, GruParams& fwd, GruParams& bwd) {
  const Shape s = g.shape(seq);
  if (s.cols == 0) throw ShapeError("bigru: empty sequence");
  if (s.rows != fwd.input || s.rows != bwd.input || fwd.hidden != bwd.hidden) {
    throw ShapeError("bigru: sequence " + s.str() + " inconsistent with GRU input size " +
                     std::to_string(fwd.input));
  }
  const std::vector<Var> f = detail::gru_scan(g, seq, fwd, false);
  const std::vector<Var> b = detail::gru_scan(g, seq, bwd, true);
  const Var top = g.concat(f, Axis::Cols);
  const Var bottom = g.concat(b, Axis::Cols);
  return g.concat({top, bottom}, Axis::Rows);
}

// ---------------------------------------------------------------------------
// Word-level additive attention

struct WordAttentionParams {
  std::size_t hidden = 0;
  Parameter proj;   // [h x 2h]
  Parameter bias;   // [h x 1]
  Parameter query;  // [1 x h]

  WordAttentionParams() = default;
  WordAttentionParams(const std::string& name, std::size_t h)
      : hidden(h),
        proj(make_param(name + ".P", h, 2 * h)),
        bias(make_param(name + ".b", h, 1)),
        query(make_param(name + ".u", 1, h)) {}

  void collect(std::vector<Parameter*>& out) {
    out.push_back(&proj);
    out.push_back(&bias);
    out.push_back(&query);
  }

  void init(std::mt19937_64& rng) {
    init_uniform(proj, 2 * hidden, rng);
    init_uniform(query, hidden, rng);
  }
};

struct AttentionPool {
  Var pooled;   // [2h x 1]
  Var weights;  // [1 x M]
};

/// k_i = tanh(P v_i + b), score_i = u k_i, alpha = masked softmax(score),
/// pooled = sum_i alpha_i v_i.
inline AttentionPool word_attention(Graph& g, Var v, std::span<const bool> mask, WordAttentionParams& p) {
  const Shape s = g.shape(v);
  if (s.rows != 2 * p.hidden) {
    throw ShapeError("word_attention: states " + s.str() + " do not have 2h = " +
                     std::to_string(2 * p.hidden) + " rows");
  }
  const Var keys = g.tanh(g.add(g.matmul(g.param(p.proj), v), g.param(p.bias)));
  const Var scores = g.matmul(g.param(p.query), keys);
  const Var alpha = g.softmax_row(scores, mask);
  const Var pooled = g.matmul(v, g.transpose(alpha));
  return {pooled, alpha};
}

// ---------------------------------------------------------------------------
// Co-attention between a primary sequence S and a secondary sequence D

struct CoAttentionParams {
  std::size_t width = 0;  // 2h
  Parameter w_r;          // affinity      [2h x 2h]
  Parameter w_s;          // primary map   [2h x 2h]
  Parameter w_d;          // secondary map [2h x 2h]
  Parameter w_hs;         // [1 x 2h]
  Parameter w_hd;         // [1 x 2h]

  CoAttentionParams() = default;
  CoAttentionParams(const std::string& name, std::size_t two_h)
      : width(two_h),
        w_r(make_param(name + ".W_r", two_h, two_h)),
        w_s(make_param(name + ".W_s", two_h, two_h)),
        w_d(make_param(name + ".W_d", two_h, two_h)),
        w_hs(make_param(name + ".w_hs", 1, two_h)),
        w_hd(make_param(name + ".w_hd", 1, two_h)) {}

  void collect(std::vector<Parameter*>& out) {
    for (Parameter* p : {&w_r, &w_s, &w_d, &w_hs, &w_hd}) out.push_back(p);
  }

  void init(std::mt19937_64& rng) {
    for (Parameter* p : {&w_r, &w_s, &w_d, &w_hs, &w_hd}) init_uniform(*p, width, rng);
  }
};

struct CoAttentionOutput {
  Var affinity;          // F   [E x N]
  Var primary_map;       // H_s [2h x N]
  Var secondary_map;     // H_d [2h x E]
  Var primary_weights;   // a_s [1 x N]
  Var secondary_weights; // a_d [1 x E]
  Var primary_pooled;    // s^  [1 x 2h]
  Var secondary_pooled;  // d^  [1 x 2h]
};

/// F   = tanh(D^T W_r S)
/// H_s = tanh(W_s S + (W_d D) F)
/// H_d = tanh(W_d D + (W_s S) F^T)
/// a_s = softmax(w_hs H_s), a_d = softmax(w_hd H_d)   (masked)
/// s^  = a_s S^T,           d^  = a_d D^T
inline CoAttentionOutput co_attention(Graph& g, Var primary, Var secondary, std::span<const bool> mask_primary,
                                      std::span<const bool> mask_secondary, CoAttentionParams& p) {
  const Shape s = g.shape(primary);
  const Shape d = g.shape(secondary);
  if (s.rows != p.width || d.rows != p.width) {
    throw ShapeError("co_attention: inputs " + s.str() + " and " + d.str() + " need " +
                     std::to_string(p.width) + " rows");
  }
  const Var w_r = g.param(p.w_r);
  const Var ws_s = g.matmul(g.param(p.w_s), primary);
  const Var wd_d = g.matmul(g.param(p.w_d), secondary);

  CoAttentionOutput out;
  out.affinity = g.tanh(g.matmul(g.transpose(secondary), g.matmul(w_r, primary)));
  out.primary_map = g.tanh(g.add(ws_s, g.matmul(wd_d, out.affinity)));
  out.secondary_map = g.tanh(g.add(wd_d, g.matmul(ws_s, g.transpose(out.affinity))));
  out.primary_weights = g.softmax_row(g.matmul(g.param(p.w_hs), out.primary_map), mask_primary);
  out.secondary_weights = g.softmax_row(g.matmul(g.param(p.w_hd), out.secondary_map), mask_secondary);
  out.primary_pooled = g.matmul(out.primary_weights, g.transpose(primary));
  out.secondary_pooled = g.matmul(out.secondary_weights, g.transpose(secondary));
  return out;
}

// ---------------------------------------------------------------------------
// Affine map

struct LinearParams {
  std::size_t in = 0;
  std::size_t out = 0;
  Parameter weight;  // [out x in]
  Parameter bias;    // [out x 1]

  LinearParams() = default;
  LinearParams(const std::string& name, std::size_t in_dim, std::size_t out_dim)
      : in(in_dim),
        out(out_dim),
        weight(make_param(name + ".W", out_dim, in_dim)),
        bias(make_param(name + ".b", out_dim, 1)) {}

  void collect(std::vector<Parameter*>& dst) {
    dst.push_back(&weight);
    dst.push_back(&bias);
  }

  void init(std::mt19937_64& rng) { init_uniform(weight, in, rng); }
};

/// W x + b for a column (or columns) x.
inline Var linear(Graph& g, Var x, LinearParams& p) {
  if (g.shape(x).rows != p.in) {
    throw ShapeError("linear: input " + g.shape(x).str() + " does not match weight [" +
                     std::to_string(p.out) + "x" + std::to_string(p.in) + "]");
  }
  return g.add(g.matmul(g.param(p.weight), x), g.param(p.bias));
}

}  // namespace dualcan
