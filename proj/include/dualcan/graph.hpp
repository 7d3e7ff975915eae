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

// Reverse-mode differentiation over an append-only tape.
//
// A Graph records every op as a node holding its output value. Node inputs
// always refer to earlier nodes, so backward() is a single sweep in reverse
// append order. Parameters enter the tape by pointer; their gradients are
// accumulated into Parameter::grad.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/tensor.hpp"

namespace dualcan {

enum class Axis : std::uint8_t { Rows, Cols };

/// Handle to a node of a Graph. Only meaningful with the graph that made it.
struct Var {
  std::uint32_t id = 0;
};

#ifdef NDEBUG
inline constexpr bool kCheckFiniteDefault = false;
#else
inline constexpr bool kCheckFiniteDefault = true;
#endif

class Graph {
 public:
  enum class Op : std::uint8_t {
    Constant,
    Param,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,
    AddScalar,
    Tanh,
    Sigmoid,
    Log,
    SoftmaxRow,
    Transpose,
    Concat,
    Slice,
    Sum,
  };

  explicit Graph(bool check_finite = kCheckFiniteDefault) : check_finite_(check_finite) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  void set_check_finite(bool on) noexcept { check_finite_ = on; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] Op op(Var v) const { return nodes_.at(v.id).op; }

  /// Input ids of a node, in argument order.
  [[nodiscard]] std::span<const std::uint32_t> inputs(Var v) const {
    const Node& n = nodes_.at(v.id);
    return {edges_.data() + n.first_input, n.num_inputs};
  }

  [[nodiscard]] const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  [[nodiscard]] const Shape& shape(Var v) const { return nodes_.at(v.id).value.shape(); }

  /// Gradient of the last backward() loss w.r.t. a node; zeros if the node
  /// was not on a path to the loss.
  [[nodiscard]] Tensor grad(Var v) const {
    if (v.id < grads_.size() && !grads_[v.id].empty()) return grads_[v.id];
    return Tensor(shape(v));
  }

  Var constant(Tensor t) { return push(Op::Constant, {}, std::move(t), false); }

  /// Leaf bound to a parameter. Repeated calls with the same parameter
  /// return the same node.
  Var param(Parameter& p) {
    if (auto it = bound_.find(&p); it != bound_.end()) return it->second;
    Var v = push(Op::Param, {}, p.value, true);
    nodes_.back().param = &p;
    bound_.emplace(&p, v);
    return v;
  }

  Var matmul(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    if (x.cols() != y.rows()) {
      throw ShapeError("matmul shape mismatch: " + x.shape().str() + " x " + y.shape().str());
    }
    Tensor out(Shape{x.rows(), y.cols()});
    gemm(x, false, y, false, out);
    return push(Op::MatMul, {a.id, b.id}, std::move(out));
  }

  /// Elementwise sum. `b` may also be a column [r x 1] or row [1 x c]
  /// vector broadcast across `a`.
  Var add(Var a, Var b) { return add_sub(Op::Add, a, b, 1.0); }
  Var sub(Var a, Var b) { return add_sub(Op::Sub, a, b, -1.0); }

  Var mul(Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require_same(x, y, "mul");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    return push(Op::Mul, {a.id, b.id}, std::move(out));
  }

  Var scale(Var a, double c) {
    Tensor out = value(a);
    for (double& v : out.data()) v *= c;
    Var r = push(Op::Scale, {a.id}, std::move(out));
    nodes_.back().scalar = c;
    return r;
  }

  Var add_scalar(Var a, double c) {
    Tensor out = value(a);
    for (double& v : out.data()) v += c;
    Var r = push(Op::AddScalar, {a.id}, std::move(out));
    nodes_.back().scalar = c;
    return r;
  }

  Var tanh(Var a) {
    Tensor out = value(a);
    for (double& v : out.data()) v = std::tanh(v);
    return push(Op::Tanh, {a.id}, std::move(out));
  }

  Var sigmoid(Var a) {
    Tensor out = value(a);
    for (double& v : out.data()) {
      // Split on sign so exp never overflows.
      if (v >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-v));
      } else {
        const double e = std::exp(v);
        v = e / (1.0 + e);
      }
    }
    return push(Op::Sigmoid, {a.id}, std::move(out));
  }

  /// Natural log of max(x, floor). floor == 0 means unclamped.
  Var log(Var a, double floor = 0.0) {
    Tensor out = value(a);
    for (double& v : out.data()) v = std::log(floor > 0.0 ? std::max(v, floor) : v);
    Var r = push(Op::Log, {a.id}, std::move(out));
    nodes_.back().scalar = floor;
    return r;
  }

  /// Softmax over a [1 x n] row. Masked-out positions (mask[i] == false)
  /// are exactly zero; at least one position must remain.
  Var softmax_row(Var a, std::span<const bool> mask = {}) {
    const Tensor& x = value(a);
    if (x.rows() != 1) throw ShapeError("softmax_row expects a row vector, got " + x.shape().str());
    const std::size_t n = x.cols();
    if (!mask.empty() && mask.size() != n) {
      throw ShapeError("softmax_row mask length " + std::to_string(mask.size()) +
                       " does not match " + x.shape().str());
    }
    auto live = [&](std::size_t i) { return mask.empty() || mask[i]; };
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (live(i)) peak = std::max(peak, x[i]);
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      throw DegenerateMaskError("softmax_row: every position is masked");
    }
    Tensor out(x.shape());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (live(i)) {
        out[i] = std::exp(x[i] - peak);
        total += out[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= total;
    return push(Op::SoftmaxRow, {a.id}, std::move(out));
  }

  Var transpose(Var a) {
    const Tensor& x = value(a);
    Tensor out(Shape{x.cols(), x.rows()});
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) out(c, r) = x(r, c);
    }
    return push(Op::Transpose, {a.id}, std::move(out));
  }

  /// Stack tensors along rows (vertically) or columns (side by side).
  Var concat(std::span<const Var> parts, Axis axis) {
    if (parts.empty()) throw ShapeError("concat of zero tensors");
    const Shape first = shape(parts[0]);
    std::size_t extent = 0;
    for (Var p : parts) {
      const Shape s = shape(p);
      if (axis == Axis::Rows ? s.cols != first.cols : s.rows != first.rows) {
        throw ShapeError("concat shape mismatch: " + first.str() + " vs " + s.str());
      }
      extent += axis == Axis::Rows ? s.rows : s.cols;
    }
    Tensor out(axis == Axis::Rows ? Shape{extent, first.cols} : Shape{first.rows, extent});
    std::size_t offset = 0;
    std::vector<std::uint32_t> ids;
    ids.reserve(parts.size());
    for (Var p : parts) {
      const Tensor& x = value(p);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
          if (axis == Axis::Rows) {
            out(r + offset, c) = x(r, c);
          } else {
            out(r, c + offset) = x(r, c);
          }
        }
      }
      offset += axis == Axis::Rows ? x.rows() : x.cols();
      ids.push_back(p.id);
    }
    Var r = push(Op::Concat, ids, std::move(out));
    nodes_.back().axis = axis;
    return r;
  }

  Var concat(std::initializer_list<Var> parts, Axis axis) {
    return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
  }

  /// Rows [begin, begin+len) or columns [begin, begin+len) of `a`.
  Var slice(Var a, Axis axis, std::size_t begin, std::size_t len) {
    const Tensor& x = value(a);
    const std::size_t extent = axis == Axis::Rows ? x.rows() : x.cols();
    if (len == 0 || begin + len > extent) {
      throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + len) +
                       ") out of range for " + x.shape().str());
    }
    Tensor out(axis == Axis::Rows ? Shape{len, x.cols()} : Shape{x.rows(), len});
    for (std::size_t r = 0; r < out.rows(); ++r) {
      for (std::size_t c = 0; c < out.cols(); ++c) {
        out(r, c) = axis == Axis::Rows ? x(r + begin, c) : x(r, c + begin);
      }
    }
    Var r = push(Op::Slice, {a.id}, std::move(out));
    nodes_.back().axis = axis;
    nodes_.back().offset = begin;
    return r;
  }

  Var sum(Var a) {
    double total = 0.0;
    for (double v : value(a).data()) total += v;
    return push(Op::Sum, {a.id}, Tensor(Shape{1, 1}, total));
  }

  /// Reverse sweep from a scalar loss. Parameter gradients are added to
  /// Parameter::grad; node gradients are readable through grad().
  void backward(Var loss) {
    if (!shape(loss).is_scalar()) {
      throw ContractError("backward requires a scalar loss, got " + shape(loss).str());
    }
    grads_.assign(nodes_.size(), Tensor());
    grads_[loss.id] = Tensor(Shape{1, 1}, 1.0);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      if (grads_[i].empty() || !nodes_[i].requires_grad) continue;
      propagate(static_cast<std::uint32_t>(i));
    }
  }

 private:
  struct Node {
    Op op = Op::Constant;
    bool requires_grad = false;
    Axis axis = Axis::Rows;
    std::uint32_t first_input = 0;
    std::uint32_t num_inputs = 0;
    std::size_t offset = 0;
    double scalar = 0.0;
    Parameter* param = nullptr;
    Tensor value;
  };

  Var push(Op op, std::initializer_list<std::uint32_t> ids, Tensor value, bool is_leaf_param = false) {
    return push(op, std::span<const std::uint32_t>(ids.begin(), ids.size()), std::move(value),
                is_leaf_param);
  }

  Var push(Op op, std::span<const std::uint32_t> ids, Tensor value, bool is_leaf_param = false) {
    if (check_finite_ && !value.all_finite()) {
      throw NumericalError("non-finite output from graph op " + std::to_string(static_cast<int>(op)));
    }
    Node n;
    n.op = op;
    n.first_input = static_cast<std::uint32_t>(edges_.size());
    n.num_inputs = static_cast<std::uint32_t>(ids.size());
    n.requires_grad = is_leaf_param;
    for (std::uint32_t id : ids) {
      edges_.push_back(id);
      n.requires_grad = n.requires_grad || nodes_[id].requires_grad;
    }
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Var add_sub(Op op, Var a, Var b, double sign) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    Tensor out = x;
    if (y.shape() == x.shape()) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * y[i];
    } else if (y.cols() == 1 && y.rows() == x.rows()) {
      for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) += sign * y[r];
      }
    } else if (y.rows() == 1 && y.cols() == x.cols()) {
      for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) += sign * y[c];
      }
    } else {
      throw ShapeError(std::string(op == Op::Add ? "add" : "sub") + " shape mismatch: " +
                       x.shape().str() + " vs " + y.shape().str());
    }
    return push(op, {a.id, b.id}, std::move(out));
  }

  static void require_same(const Tensor& x, const Tensor& y, const char* what) {
    if (x.shape() != y.shape()) {
      throw ShapeError(std::string(what) + " shape mismatch: " + x.shape().str() + " vs " +
                       y.shape().str());
    }
  }

  // out += op(a) * op(b), where op transposes when the flag is set.
  static void gemm(const Tensor& a, bool ta, const Tensor& b, bool tb, Tensor& out) {
    const std::size_t m = ta ? a.cols() : a.rows();
    const std::size_t k = ta ? a.rows() : a.cols();
    const std::size_t n = tb ? b.rows() : b.cols();
    const std::size_t lda = a.cols();
    const std::size_t ldb = b.cols();
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    for (std::size_t i = 0; i < m; ++i) {
      double* row = po + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ta ? pa[p * lda + i] : pa[i * lda + p];
        if (av == 0.0) continue;
        if (tb) {
          for (std::size_t j = 0; j < n; ++j) row[j] += av * pb[j * ldb + p];
        } else {
          const double* brow = pb + p * ldb;
          for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
        }
      }
    }
  }

  Tensor& grad_slot(std::uint32_t id) {
    Tensor& g = grads_[id];
    if (g.empty()) g = Tensor(nodes_[id].value.shape());
    return g;
  }

  void accumulate(std::uint32_t id, const Tensor& g, double sign = 1.0) {
    if (!nodes_[id].requires_grad) return;
    Tensor& dst = grad_slot(id);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += sign * g[i];
  }

  void propagate(std::uint32_t id) {
    const Node& n = nodes_[id];
    const Tensor& g = grads_[id];
    const std::uint32_t* in = edges_.data() + n.first_input;
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Param: {
        Tensor& acc = n.param->grad;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
        break;
      }
      case Op::MatMul: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        if (nodes_[in[0]].requires_grad) gemm(g, false, b, true, grad_slot(in[0]));
        if (nodes_[in[1]].requires_grad) gemm(a, true, g, false, grad_slot(in[1]));
        break;
      }
      case Op::Add:
      case Op::Sub: {
        accumulate(in[0], g);
        if (!nodes_[in[1]].requires_grad) break;
        const double sign = n.op == Op::Add ? 1.0 : -1.0;
        Tensor& gb = grad_slot(in[1]);
        if (gb.shape() == g.shape()) {
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += sign * g[i];
        } else if (gb.cols() == 1 && gb.rows() == g.rows()) {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) gb[r] += sign * g(r, c);
          }
        } else {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += sign * g(r, c);
          }
        }
        break;
      }
      case Op::Mul: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        if (nodes_[in[0]].requires_grad) {
          Tensor& ga = grad_slot(in[0]);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
        }
        if (nodes_[in[1]].requires_grad) {
          Tensor& gb = grad_slot(in[1]);
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
        }
        break;
      }
      case Op::Scale:
        accumulate(in[0], g, n.scalar);
        break;
      case Op::AddScalar:
        accumulate(in[0], g);
        break;
      case Op::Tanh: {
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
        break;
      }
      case Op::Sigmoid: {
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
        break;
      }
      case Op::Log: {
        const Tensor& x = nodes_[in[0]].value;
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (n.scalar > 0.0 && x[i] < n.scalar) continue;
          ga[i] += g[i] / x[i];
        }
        break;
      }
      case Op::SoftmaxRow: {
        const Tensor& y = n.value;
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += y[i] * g[i];
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t i = 0; i < y.size(); ++i) ga[i] += y[i] * (g[i] - dot);
        break;
      }
      case Op::Transpose: {
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) ga(c, r) += g(r, c);
        }
        break;
      }
      case Op::Concat: {
        std::size_t offset = 0;
        for (std::uint32_t k = 0; k < n.num_inputs; ++k) {
          const Shape s = nodes_[in[k]].value.shape();
          if (nodes_[in[k]].requires_grad) {
            Tensor& ga = grad_slot(in[k]);
            for (std::size_t r = 0; r < s.rows; ++r) {
              for (std::size_t c = 0; c < s.cols; ++c) {
                ga(r, c) += n.axis == Axis::Rows ? g(r + offset, c) : g(r, c + offset);
              }
            }
          }
          offset += n.axis == Axis::Rows ? s.rows : s.cols;
        }
        break;
      }
      case Op::Slice: {
        Tensor& ga = grad_slot(in[0]);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) {
            if (n.axis == Axis::Rows) {
              ga(r + n.offset, c) += g(r, c);
            } else {
              ga(r, c + n.offset) += g(r, c);
            }
          }
        }
        break;
      }
      case Op::Sum: {
        Tensor& ga = grad_slot(in[0]);
        for (double& v : ga.data()) v += g[0];
        break;
      }
    }
  }

  bool check_finite_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> edges_;
  std::vector<Tensor> grads_;
  std::unordered_map<const Parameter*, Var> bound_;
};

}  // namespace dualcan
