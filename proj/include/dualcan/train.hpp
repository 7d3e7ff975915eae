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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dualcan/adam.hpp"
#include "dualcan/errors.hpp"
#include "dualcan/graph.hpp"
#include "dualcan/metrics.hpp"
#include "dualcan/model.hpp"
#include "dualcan/types.hpp"

namespace dualcan {

/// Fisher-Yates driven directly by the engine so a seed gives the same order
/// with any standard library.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Forward + backward over one mini-batch and a single Adam update on the
/// batch-mean loss. Returns the mean loss before the update.
inline double train_step(ModelParams& params, AdamState& adam, std::span<const EncodedDocument* const> batch,
                         const Tensor& embeddings, double lr, double clip_norm) {
  if (batch.empty()) throw ContractError("train_step: empty batch");
  std::vector<Parameter*> all = params.parameters();
  params.zero_grad();
  const double weight = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const EncodedDocument* doc : batch) {
    Graph g;
    const ForwardPass f = forward(g, *doc, embeddings, params);
    const Var loss = cross_entropy(g, f.probabilities, doc->label);
    const double value = g.value(loss)[0];
    if (!std::isfinite(value)) throw NumericalError("non-finite loss on sample '" + doc->id + "'");
    total += value;
    g.backward(g.scale(loss, weight));
  }
  clip_global_norm(all, clip_norm);
  adam_step(all, adam, lr);
  return total * weight;
}

struct EvaluationResult {
  MetricsReport metrics;
  std::vector<int> predictions;
  std::vector<double> fake_probabilities;
  std::vector<int> labels;
  double mean_loss = 0.0;
};

inline EvaluationResult evaluate(ModelParams& params, std::span<const EncodedDocument> docs,
                                 const Tensor& embeddings) {
  if (docs.empty()) throw DataError("evaluation set is empty");
  EvaluationResult r;
  double loss = 0.0;
  for (const EncodedDocument& doc : docs) {
    const Prediction p = predict(doc, embeddings, params);
    r.predictions.push_back(p.label);
    r.fake_probabilities.push_back(p.probabilities[1]);
    r.labels.push_back(doc.label);
    loss += -std::log(std::max(p.probabilities[static_cast<std::size_t>(doc.label)], kLogFloor));
  }
  r.metrics = evaluate_predictions(r.predictions, r.fake_probabilities, r.labels);
  r.mean_loss = loss / static_cast<double>(docs.size());
  return r;
}

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
  MetricsReport validation;
  bool improved = false;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainResult {
  ModelParams best;
  std::size_t best_epoch = 0;
  double best_validation_f1 = -1.0;
  double best_validation_loss = 0.0;
  std::vector<EpochLog> epochs;
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch Adam with seeded shuffling and early stopping on validation
/// macro-F1 (ties go to the lower validation loss). Returns the parameters of
/// the best validation epoch.
inline TrainResult train(std::span<const EncodedDocument> train_set, std::span<const EncodedDocument> validation_set,
                         const Tensor& embeddings, const HyperParams& hp, ModelParams init,
                         const EpochCallback& on_epoch = {}) {
  if (train_set.empty() || validation_set.empty()) {
    throw DataError("training needs non-empty train and validation splits");
  }
  hp.validate();
  TrainResult result;
  ModelParams params = std::move(init);
  std::vector<Parameter*> all = params.parameters();
  AdamState adam(all);
  std::mt19937_64 rng(hp.seed);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t since_best = 0;

  result.best = params;
  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    seeded_shuffle(order, rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + hp.batch_size);
      std::vector<const EncodedDocument*> batch;
      for (std::size_t i = start; i < stop; ++i) batch.push_back(&train_set[order[i]]);
      double loss = 0.0;
      try {
        loss = train_step(params, adam, batch, embeddings, hp.learning_rate, hp.clip_norm);
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged in epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index) + ": " + e.what());
      }
      loss_sum += loss * static_cast<double>(batch.size());
      ++result.steps;
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(order.size());
    const EvaluationResult val = evaluate(params, validation_set, embeddings);
    log.validation = val.metrics;
    log.validation_loss = val.mean_loss;
    const double f1 = log.validation.f1_macro;
    if (f1 > result.best_validation_f1 ||
        (f1 == result.best_validation_f1 && log.validation_loss < result.best_validation_loss)) {
      result.best_validation_f1 = f1;
      result.best_validation_loss = log.validation_loss;
      result.best_epoch = epoch;
      result.best = params;
      log.improved = true;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
    if (since_best >= hp.patience) break;
  }
  return result;
}

}  // namespace dualcan
