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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/graph.hpp"
#include "dualcan/tensor.hpp"

namespace dualcan {

/// Builds a scalar loss on a fresh graph from the current parameter values.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckOptions {
  double step = 1e-6;
  /// Coordinates whose analytic and numeric gradients are both below this
  /// magnitude are compared by absolute rather than relative error.
  double abs_floor = 1e-10;
  /// Tensors up to this size are checked exhaustively; larger ones get this
  /// many sampled coordinates. Zero checks everything.
  std::size_t max_coords = 64;
  std::uint64_t seed = 0x5eed;
};

struct GradCheckEntry {
  std::string name;
  std::size_t checked = 0;
  std::size_t worst_index = 0;
  double worst_error = 0.0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  [[nodiscard]] double max_error() const {
    double worst = 0.0;
    for (const auto& e : entries) worst = std::max(worst, e.worst_error);
    return worst;
  }
  [[nodiscard]] bool passed(double tol) const { return max_error() <= tol; }
};

/// Error between an analytic and a numeric derivative: relative, or absolute
/// when both are below `abs_floor`.
inline double gradient_error(double analytic, double numeric, double abs_floor) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale < abs_floor ? diff : diff / scale;
}

namespace detail {

inline double evaluate(const LossBuilder& f) {
  Graph g(/*check_finite=*/false);
  const Var loss = f(g);
  const Tensor& v = g.value(loss);
  if (!v.shape().is_scalar()) throw ContractError("grad_check: loss is not scalar");
  if (!std::isfinite(v[0])) throw NumericalError("grad_check: loss evaluated to a non-finite value");
  return v[0];
}

inline std::vector<std::size_t> pick_coords(std::size_t size, std::size_t max_coords, std::mt19937_64& rng) {
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (max_coords == 0 || size <= max_coords) return all;
  // Partial Fisher-Yates; draws are taken straight from the engine so the
  // selection does not depend on the standard library's distributions.
  for (std::size_t i = 0; i < max_coords; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (size - i));
    std::swap(all[i], all[j]);
  }
  all.resize(max_coords);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace detail

/// Compares reverse-mode gradients against central differences
/// (f(p+h) - f(p-h)) / 2h, coordinate by coordinate.
inline GradCheckReport grad_check(const LossBuilder& f, std::span<Parameter* const> params,
                                  const GradCheckOptions& opts = {}) {
  if (!(opts.step >= 1e-7 && opts.step <= 1e-4)) {
    throw ContractError("grad_check: step must lie in [1e-7, 1e-4]");
  }
  if (opts.max_coords != 0 && opts.max_coords < 32) {
    throw ContractError("grad_check: max_coords must be 0 or at least 32");
  }

  for (Parameter* p : params) p->zero_grad();
  {
    Graph g(/*check_finite=*/false);
    const Var loss = f(g);
    if (!std::isfinite(g.value(loss)[0])) {
      throw NumericalError("grad_check: loss evaluated to a non-finite value");
    }
    g.backward(loss);
  }

  std::mt19937_64 rng(opts.seed);
  GradCheckReport report;
  for (Parameter* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    for (std::size_t i : detail::pick_coords(p->value.size(), opts.max_coords, rng)) {
      const double saved = p->value[i];
      p->value[i] = saved + opts.step;
      const double up = detail::evaluate(f);
      p->value[i] = saved - opts.step;
      const double down = detail::evaluate(f);
      p->value[i] = saved;

      const double numeric = (up - down) / (2.0 * opts.step);
      const double analytic = p->grad[i];
      const double err = gradient_error(analytic, numeric, opts.abs_floor);
      if (entry.checked == 0 || err > entry.worst_error) {
        entry.worst_error = err;
        entry.worst_index = i;
        entry.analytic = analytic;
        entry.numeric = numeric;
      }
      ++entry.checked;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

inline GradCheckReport grad_check(const LossBuilder& f, std::vector<Parameter*> params,
                                  const GradCheckOptions& opts = {}) {
  return grad_check(f, std::span<Parameter* const>(params), opts);
}

}  // namespace dualcan
