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

// Binary classification metrics. Label 1 (fake) is the positive class.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualcan/errors.hpp"

namespace dualcan {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

inline Confusion confusion(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw ContractError("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                        std::to_string(labels.size()) + " labels");
  }
  if (preds.empty()) throw ContractError("confusion: no samples");
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == 1;
    const bool y = labels[i] == 1;
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

enum class Averaging { Positive, Macro };

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline PrecisionRecallF1 class_prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrecisionRecallF1 r;
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  const double s = r.precision + r.recall;
  r.f1 = s == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / s;
  return r;
}

}  // namespace detail

/// Zero denominators give 0. Macro averaging is the unweighted mean of the
/// per-class precision, recall and F1.
inline PrecisionRecallF1 prf(const Confusion& c, Averaging averaging) {
  const PrecisionRecallF1 fake = detail::class_prf(c.tp, c.fp, c.fn);
  if (averaging == Averaging::Positive) return fake;
  const PrecisionRecallF1 real = detail::class_prf(c.tn, c.fn, c.fp);
  return {(fake.precision + real.precision) / 2.0, (fake.recall + real.recall) / 2.0, (fake.f1 + real.f1) / 2.0};
}

inline double accuracy(std::span<const int> preds, std::span<const int> labels) {
  const Confusion c = confusion(preds, labels);
  return detail::ratio(c.tp + c.tn, c.total());
}

/// Average precision over the ranking by descending score (ties keep input
/// order): sum over positives of precision at that rank, divided by the
/// number of positives.
inline double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ContractError("pr_auc: scores and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw ContractError("pr_auc: undefined without positive labels");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] != 1) continue;
    ++hits;
    ap += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return ap / static_cast<double>(positives);
}

struct MetricsReport {
  double accuracy = 0.0;
  double precision_pos = 0.0;
  double recall_pos = 0.0;
  double f1_pos = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  std::optional<double> pr_auc;  // absent when the labels have no positive
  std::size_t samples = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// `scores` are probabilities of the fake class.
inline MetricsReport evaluate_predictions(std::span<const int> preds, std::span<const double> scores,
                                          std::span<const int> labels) {
  const Confusion c = confusion(preds, labels);
  const PrecisionRecallF1 pos = prf(c, Averaging::Positive);
  const PrecisionRecallF1 macro = prf(c, Averaging::Macro);
  MetricsReport r;
  r.accuracy = accuracy(preds, labels);
  r.precision_pos = pos.precision;
  r.recall_pos = pos.recall;
  r.f1_pos = pos.f1;
  r.precision_macro = macro.precision;
  r.recall_macro = macro.recall;
  r.f1_macro = macro.f1;
  if (c.tp + c.fn > 0) r.pr_auc = pr_auc(scores, labels);
  r.samples = preds.size();
  return r;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["precision_pos"] = r.precision_pos;
  j["recall_pos"] = r.recall_pos;
  j["f1_pos"] = r.f1_pos;
  j["precision_macro"] = r.precision_macro;
  j["recall_macro"] = r.recall_macro;
  j["f1_macro"] = r.f1_macro;
  j["pr_auc"] = r.pr_auc ? nlohmann::json(*r.pr_auc) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dualcan
