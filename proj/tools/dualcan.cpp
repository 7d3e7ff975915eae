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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dualcan/commands.hpp"

namespace {

void add_common(CLI::App* sub, dualcan::CommandOptions& opt) {
  sub->add_option("--config", opt.config, "JSON run configuration");
  sub->add_option("--profile", opt.profile, "hyperparameter profile: gossipcop, coaid or synthetic");
  sub->add_option("--mode", opt.mode, "input sources: N+E, N+C or N+C+E");
  sub->add_option("--seed", opt.seed, "seed for initialization, shuffling and the split");
  sub->add_option("--out", opt.out, "output directory");
  sub->add_option("--dataset", opt.dataset, "line-delimited JSON dataset");
  sub->add_option("--entities", opt.entities, "entity description snapshot (JSONL)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual co-attention fake news detector"};
  app.require_subcommand(1);
  dualcan::CommandOptions opt;

  auto* train = app.add_subcommand("train", "train a model and write checkpoint, epoch log and test metrics");
  add_common(train, opt);
  train->add_option("--embeddings", opt.embeddings, "text word vectors");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, opt);
  eval->add_option("--checkpoint", opt.checkpoint, "checkpoint file")->required();
  eval->add_option("--split", opt.split, "all, train, validation or test");

  auto* explain = app.add_subcommand("explain", "export attention weights and heatmaps");
  add_common(explain, opt);
  explain->add_option("--checkpoint", opt.checkpoint, "checkpoint file")->required();
  explain->add_option("--split", opt.split, "all, train, validation or test");
  explain->add_option("--ids", opt.ids, "sample ids (default: every sample)");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--preset", opt.preset, "mixed, news, comment or entity");
  synth->add_option("--size", opt.size, "number of documents");
  synth->add_option("--fake-fraction", opt.fake_fraction, "share of fake documents");
  synth->add_option("--embed-dim", opt.embed_dim, "word vector width");
  synth->add_option("--seed", opt.seed, "generator seed");
  synth->add_option("--out", opt.out, "output directory");

  auto* preprocess = app.add_subcommand("preprocess", "write corpus statistics and the training vocabulary");
  add_common(preprocess, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dualcan::kExitOk : dualcan::kExitUsage;
  }

  if (train->parsed()) return dualcan::cmd_train(opt, std::cout, std::cerr);
  if (eval->parsed()) return dualcan::cmd_eval(opt, std::cout, std::cerr);
  if (explain->parsed()) return dualcan::cmd_explain(opt, std::cout, std::cerr);
  if (synth->parsed()) return dualcan::cmd_synth(opt, std::cout, std::cerr);
  return dualcan::cmd_preprocess(opt, std::cout, std::cerr);
}
