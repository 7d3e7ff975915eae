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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dualcan/commands.hpp"
#include "support.hpp"

namespace dualcan {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Workspace {
  fs::path dir;
  fs::path config;
  fs::path run;  // output directory named in the config
};

// A synthetic corpus plus a config that points at it with relative paths.
Workspace make_workspace(const std::string& name, const std::string& preset, std::size_t size,
                         const json& hyper) {
  Workspace w;
  w.dir = testing::scratch_dir("cli-" + name);
  CommandOptions synth;
  synth.preset = preset;
  synth.size = size;
  synth.out = w.dir / "data";
  std::ostringstream log, err;
  EXPECT_EQ(cmd_synth(synth, log, err), kExitOk) << err.str();
  json cfg = {{"profile", "synthetic"},
              {"out", "run"},
              {"data",
               {{"dataset", "data/dataset.jsonl"},
                {"embeddings", "data/embeddings.txt"},
                {"entities", "data/entities.jsonl"}}},
              {"hyper", hyper}};
  w.config = w.dir / "cfg.json";
  w.run = w.dir / "run";
  write(w.config, cfg.dump(2));
  return w;
}

CommandOptions with_config(const Workspace& w) {
  CommandOptions opt;
  opt.config = w.config;
  return opt;
}

int train_quietly(const CommandOptions& opt, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cmd_train(opt, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

const json kQuick = {{"max_epochs", 3}};

// ---------------------------------------------------------------------------
// Configuration and exit codes

TEST(CliConfig, FlagsOverrideConfig) {
  const Workspace w = make_workspace("config", "mixed", 20, {{"hidden", 5}, {"learning_rate", 0.02}});
  CommandOptions opt = with_config(w);
  RunConfig rc = resolve_config(opt);
  EXPECT_EQ(rc.hyper.hidden, 5u);
  EXPECT_EQ(rc.hyper.learning_rate, 0.02);
  EXPECT_EQ(rc.hyper.embed_dim, 16u);
  EXPECT_EQ(rc.dataset, w.dir / "data/dataset.jsonl");
  EXPECT_EQ(rc.out, w.run);
  EXPECT_TRUE(rc.hyper_given);
  opt.seed = 99;
  opt.mode = "N+C";
  opt.out = w.dir / "elsewhere";
  rc = resolve_config(opt);
  EXPECT_EQ(rc.hyper.seed, 99u);
  EXPECT_EQ(rc.mode, InputMode::NewsComments);
  EXPECT_EQ(rc.out, w.dir / "elsewhere");
}

TEST(CliConfig, BadConfigsExitNonZero) {
  const fs::path dir = testing::scratch_dir("cli-bad-config");
  std::string err;
  auto run = [&](const std::string& text) {
    write(dir / "cfg.json", text);
    CommandOptions opt;
    opt.config = dir / "cfg.json";
    return train_quietly(opt, &err);
  };
  EXPECT_EQ(run("{not json"), kExitUsage);
  EXPECT_EQ(run(R"({"colour": "blue"})"), kExitUsage);
  EXPECT_NE(err.find("colour"), std::string::npos);
  EXPECT_EQ(run(R"({"profile": "twitter"})"), kExitUsage);
  EXPECT_EQ(run(R"({"hyper": {"hidden": 0}})"), kExitUsage);
  EXPECT_EQ(run(R"({"hyper": {"dropout": 0.5}})"), kExitUsage);
  EXPECT_EQ(run(R"({"mode": "C+E"})"), kExitUsage);
  EXPECT_EQ(run(R"({"data": {"dataset": "missing.jsonl"}})"), kExitData);
  EXPECT_EQ(run(R"({"profile": "synthetic"})"), kExitUsage);  // no embeddings
  CommandOptions absent;
  absent.config = dir / "absent.json";
  EXPECT_EQ(train_quietly(absent), kExitData);
}

TEST(CliConfig, ExitCodeTaxonomy) {
  std::ostringstream err;
  EXPECT_EQ(guarded([] {}, err), kExitOk);
  EXPECT_EQ(guarded([] { throw ContractError("x"); }, err), kExitUsage);
  EXPECT_EQ(guarded([] { throw ShapeError("x"); }, err), kExitUsage);
  EXPECT_EQ(guarded([] { throw DataError("x"); }, err), kExitData);
  EXPECT_EQ(guarded([] { throw NumericalError("x"); }, err), kExitNumerical);
}

TEST(CliTrain, EmptyTestFileExitsNonZero) {
  const Workspace w = make_workspace("empty-test", "mixed", 30, kQuick);
  const std::string all = slurp(w.dir / "data/dataset.jsonl");
  std::istringstream lines(all);
  std::string train, validation, line;
  for (int i = 0; std::getline(lines, line); ++i) (i < 20 ? train : validation) += line + '\n';
  write(w.dir / "train.jsonl", train);
  write(w.dir / "validation.jsonl", validation);
  write(w.dir / "test.jsonl", "");
  write(w.config, json({{"profile", "synthetic"},
                        {"out", "run"},
                        {"data",
                         {{"train", "train.jsonl"},
                          {"validation", "validation.jsonl"},
                          {"test", "test.jsonl"},
                          {"embeddings", "data/embeddings.txt"},
                          {"entities", "data/entities.jsonl"}}}})
                      .dump());
  std::string err;
  EXPECT_EQ(train_quietly(with_config(w), &err), kExitData);
  EXPECT_NE(err.find("test split is empty"), std::string::npos) << err;

  CommandOptions eval = with_config(w);
  eval.dataset = w.dir / "test.jsonl";
  eval.checkpoint = w.dir / "none.ckpt";
  std::ostringstream out, e;
  EXPECT_NE(cmd_eval(eval, out, e), kExitOk);
}

// ---------------------------------------------------------------------------
// Training artifacts

std::vector<std::vector<double>> param_values(const Checkpoint& c) {
  std::vector<std::vector<double>> out;
  for (const Parameter* p : c.params.parameters()) out.push_back(testing::values(p->value));
  return out;
}

TEST(CliTrain, WritesArtifacts) {
  const Workspace w = make_workspace("artifacts", "mixed", 40, kQuick);
  ASSERT_EQ(train_quietly(with_config(w)), kExitOk);
  for (const char* f : {"initial.ckpt", "model.ckpt", "epochs.csv", "metrics.json"}) {
    EXPECT_TRUE(fs::exists(w.run / f)) << f;
  }
  std::istringstream csv(slurp(w.run / "epochs.csv"));
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("epoch,train_loss,val_loss,val_accuracy", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(csv, row)) ++rows;
  EXPECT_GE(rows, 1u);
  EXPECT_LE(rows, 3u);
  const json metrics = json::parse(slurp(w.run / "metrics.json"));
  for (const char* k : {"accuracy", "precision_pos", "recall_pos", "f1_pos", "precision_macro", "recall_macro",
                        "f1_macro", "pr_auc"}) {
    EXPECT_TRUE(metrics.contains(k)) << k;
  }
}

TEST(CliTrain, ZeroLearningRateKeepsInitialParameters) {
  const Workspace w = make_workspace("lr0", "mixed", 30, {{"max_epochs", 2}, {"learning_rate", 0}});
  ASSERT_EQ(train_quietly(with_config(w)), kExitOk);
  const Checkpoint initial = load_checkpoint((w.run / "initial.ckpt").string());
  const Checkpoint final_ckpt = load_checkpoint((w.run / "model.ckpt").string());
  EXPECT_EQ(param_values(final_ckpt), param_values(initial));
}

TEST(CliTrain, SameSeedSameEpochLog) {
  const Workspace w = make_workspace("determinism", "mixed", 40, kQuick);
  CommandOptions a = with_config(w), b = with_config(w);
  a.out = w.dir / "a";
  b.out = w.dir / "b";
  ASSERT_EQ(train_quietly(a), kExitOk);
  ASSERT_EQ(train_quietly(b), kExitOk);
  EXPECT_EQ(slurp(w.dir / "a/epochs.csv"), slurp(w.dir / "b/epochs.csv"));
  EXPECT_EQ(slurp(w.dir / "a/model.ckpt"), slurp(w.dir / "b/model.ckpt"));
  b.seed = 5;
  b.out = w.dir / "c";
  ASSERT_EQ(train_quietly(b), kExitOk);
  EXPECT_NE(slurp(w.dir / "a/initial.ckpt"), slurp(w.dir / "c/initial.ckpt"));
}

// ---------------------------------------------------------------------------
// Evaluation

TEST(CliEval, ReproducesLoggedTestMetrics) {
  const Workspace w = make_workspace("eval", "mixed", 60, kQuick);
  CommandOptions opt = with_config(w);
  opt.seed = 11;
  ASSERT_EQ(train_quietly(opt), kExitOk);
  CommandOptions eval;
  eval.config = w.config;
  eval.checkpoint = w.run / "model.ckpt";
  eval.split = "test";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval(eval, out, err), kExitOk) << err.str();
  EXPECT_EQ(slurp(w.run / "eval_metrics.json"), slurp(w.run / "metrics.json"));
  EXPECT_EQ(out.str(), slurp(w.run / "metrics.json"));
}

TEST(CliEval, ArchitectureMismatchIsUsageError) {
  const Workspace w = make_workspace("eval-mismatch", "mixed", 30, kQuick);
  ASSERT_EQ(train_quietly(with_config(w)), kExitOk);
  write(w.dir / "other.json", json({{"profile", "synthetic"},
                                    {"out", "run"},
                                    {"data", {{"dataset", "data/dataset.jsonl"}}},
                                    {"hyper", {{"hidden", 4}}}})
                                  .dump());
  CommandOptions eval;
  eval.config = w.dir / "other.json";
  eval.checkpoint = w.run / "model.ckpt";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_eval(eval, out, err), kExitUsage);
  EXPECT_NE(err.str().find("do not match"), std::string::npos);
}

TEST(CliEval, OverfitModelScoresPerfectlyOnItsTrainingSet) {
  Workspace w = make_workspace("overfit", "mixed", 16, {});
  // validating on the training file makes the kept epoch the memorized one
  write(w.config, json({{"profile", "synthetic"},
                        {"out", "run"},
                        {"data",
                         {{"train", "data/dataset.jsonl"},
                          {"validation", "data/dataset.jsonl"},
                          {"test", "data/dataset.jsonl"},
                          {"embeddings", "data/embeddings.txt"},
                          {"entities", "data/entities.jsonl"}}},
                        {"hyper", {{"max_epochs", 30}, {"patience", 30}}}})
                      .dump());
  ASSERT_EQ(train_quietly(with_config(w)), kExitOk);
  CommandOptions eval = with_config(w);
  eval.checkpoint = w.run / "model.ckpt";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval(eval, out, err), kExitOk) << err.str();
  EXPECT_EQ(json::parse(out.str())["accuracy"].get<double>(), 1.0);
}

TEST(CliEval, UnknownSplitIsUsageError) {
  const Workspace w = make_workspace("eval-split", "mixed", 30, kQuick);
  ASSERT_EQ(train_quietly(with_config(w)), kExitOk);
  CommandOptions eval = with_config(w);
  eval.checkpoint = w.run / "model.ckpt";
  eval.split = "dev";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_eval(eval, out, err), kExitUsage);
  eval.split = "all";
  eval.checkpoint.reset();
  EXPECT_EQ(cmd_eval(eval, out, err), kExitUsage);
}

// ---------------------------------------------------------------------------
// Explanations

struct SvgColumnGrays {
  std::vector<std::vector<int>> columns;
};

std::vector<int> svg_cell_grays(const std::string& svg) {
  static const std::regex cell(R"(<rect x="\d+" y="\d+" width="\d+" height="\d+" fill="rgb\((\d+),)");
  std::vector<int> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoi((*it)[1]));
  }
  return out;
}

double unmasked_sum(const json& weights, const json& mask) {
  bool any = false;
  for (const auto& m : mask) any = any || m.get<int>() == 1;
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += (!any || mask[i].get<int>() == 1) ? weights[i].get<double>() : 0.0;
  return s;
}

class CliExplain : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ws_ = new Workspace(make_workspace("explain", "entity", 60, kQuick));
    ASSERT_EQ(train_quietly(with_config(*ws_)), kExitOk);
    write(ws_->dir / "single.jsonl",
          R"j({"id": "single", "label": 1, "news": "Mercury reported stories today", )j"
          R"j("comments": ["fyi this story is fake"], "entities": [{"name": "Mercury (satire)"}]})j"
          "\n" +
              slurp(ws_->dir / "data/dataset.jsonl"));
  }
  static void TearDownTestSuite() {
    delete ws_;
    ws_ = nullptr;
  }

  static CommandOptions explain_options(std::vector<std::string> ids) {
    CommandOptions opt = with_config(*ws_);
    opt.dataset = ws_->dir / "single.jsonl";
    opt.checkpoint = ws_->run / "model.ckpt";
    opt.ids = std::move(ids);
    return opt;
  }

  static inline Workspace* ws_ = nullptr;
};

TEST_F(CliExplain, SkipsUnknownIdsAndWritesReport) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(explain_options({"single", "nope", "syn-0003"}), out, err), kExitOk) << err.str();
  const json report = json::parse(slurp(ws_->run / "attention.json"));
  EXPECT_EQ(report["mode"], "N+C+E");
  EXPECT_EQ(report["skipped"], json::array({"nope"}));
  ASSERT_EQ(report["samples"].size(), 2u);
  EXPECT_EQ(report["samples"][0]["id"], "single");
  for (const char* f : {"attention_news_entity.svg", "attention_entity.svg", "attention_news_comment.svg",
                        "attention_comment.svg"}) {
    EXPECT_TRUE(fs::exists(ws_->run / f)) << f;
  }
}

TEST_F(CliExplain, OnlyUnknownIdsIsDataError) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_explain(explain_options({"nope"}), out, err), kExitData);
}

TEST_F(CliExplain, ReportVectorsSumToOne) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(explain_options({}), out, err), kExitOk) << err.str();
  const json report = json::parse(slurp(ws_->run / "attention.json"));
  EXPECT_EQ(report["samples"].size(), 61u);
  for (const json& s : report["samples"]) {
    EXPECT_NEAR(unmasked_sum(s["news_entity"], s["news_mask"]), 1.0, 1e-6);
    EXPECT_NEAR(unmasked_sum(s["news_comment"], s["news_mask"]), 1.0, 1e-6);
    EXPECT_NEAR(unmasked_sum(s["entity"], s["entity_mask"]), 1.0, 1e-6);
    EXPECT_NEAR(unmasked_sum(s["comment"], s["comment_mask"]), 1.0, 1e-6);
    EXPECT_NEAR(s["probabilities"][0].get<double>() + s["probabilities"][1].get<double>(), 1.0, 1e-12);
  }
}

TEST_F(CliExplain, SingleSentenceCellIsFullyDark) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(explain_options({"single"}), out, err), kExitOk) << err.str();
  const json report = json::parse(slurp(ws_->run / "attention.json"));
  EXPECT_EQ(report["samples"][0]["news_entity"][0].get<double>(), 1.0);
  const std::vector<int> grays = svg_cell_grays(slurp(ws_->run / "attention_news_entity.svg"));
  const std::size_t rows = report["samples"][0]["news_entity"].size();
  ASSERT_EQ(grays.size(), rows);
  EXPECT_EQ(grays[0], 0);
  for (std::size_t r = 1; r < rows; ++r) EXPECT_EQ(grays[r], 255);
}

TEST_F(CliExplain, ShadingIsMonotonePerColumn) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(explain_options({}), out, err), kExitOk) << err.str();
  const json report = json::parse(slurp(ws_->run / "attention.json"));
  for (const auto& [family, mask_key] : {std::pair<std::string, std::string>{"entity", "entity_mask"},
                                         {"comment", "comment_mask"},
                                         {"news_comment", "news_mask"}}) {
    const std::vector<int> grays = svg_cell_grays(slurp(ws_->run / ("attention_" + family + ".svg")));
    std::size_t k = 0;
    for (const json& s : report["samples"]) {
      const json& w = s[family];
      const json& m = s[mask_key];
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < w.size(); ++j) {
          if (m[i] != 1 || m[j] != 1) continue;
          if (w[i].get<double>() > w[j].get<double>()) {
            EXPECT_LE(grays[k + i], grays[k + j]) << family;
          }
        }
        if (m[i] != 1) {
          EXPECT_EQ(grays[k + i], 255);
        }
      }
      k += w.size();
    }
    EXPECT_EQ(k, grays.size());
  }
}

TEST(Heatmap, GrayScale) {
  EXPECT_EQ(heatmap_gray(1.0, 1.0), 0);
  EXPECT_EQ(heatmap_gray(0.0, 1.0), 255);
  EXPECT_EQ(heatmap_gray(0.25, 0.5), 128);
  EXPECT_EQ(heatmap_gray(0.3, 0.0), 255);
  int last = 256;
  for (int i = 0; i <= 100; ++i) {
    const int g = heatmap_gray(i / 100.0, 1.0);
    EXPECT_LE(g, last);
    last = g;
  }
}

// ---------------------------------------------------------------------------
// Synth and preprocess

TEST(CliSynth, MatchesGenerator) {
  const fs::path dir = testing::scratch_dir("cli-synth");
  CommandOptions opt;
  opt.preset = "comment";
  opt.size = 25;
  opt.seed = 3;
  opt.out = dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_synth(opt, out, err), kExitOk);
  SyntheticSpec spec = SyntheticSpec::preset("comment");
  spec.size = 25;
  spec.seed = 3;
  const SyntheticCorpus want = gen_synthetic(spec);
  EXPECT_EQ(slurp(dir / "dataset.jsonl"), want.dataset);
  EXPECT_EQ(slurp(dir / "entities.jsonl"), want.snapshot);
  EXPECT_EQ(slurp(dir / "embeddings.txt"), want.embeddings);
  opt.preset = "sports";
  EXPECT_EQ(cmd_synth(opt, out, err), kExitUsage);
}

TEST(CliPreprocess, WritesStatsAndVocabulary) {
  const Workspace w = make_workspace("preprocess", "mixed", 20, kQuick);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_preprocess(with_config(w), out, err), kExitOk) << err.str();
  const json stats = json::parse(slurp(w.run / "stats.json"));
  EXPECT_EQ(stats["total_news"], 20);
  EXPECT_EQ(stats["true_news"].get<int>() + stats["fake_news"].get<int>(), 20);
  const std::string vocab = slurp(w.run / "vocab.txt");
  EXPECT_EQ(vocab.rfind("<PAD>\n<OOV>\n", 0), 0u);
}

// ---------------------------------------------------------------------------
// The installed binary

int run_binary(const std::string& args) {
  const std::string cmd = std::string(DUALCAN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(run_binary("--help"), kExitOk);
  EXPECT_EQ(run_binary(""), kExitUsage);
  EXPECT_EQ(run_binary("fly"), kExitUsage);
  EXPECT_EQ(run_binary("train --bogus"), kExitUsage);
  EXPECT_EQ(run_binary("eval"), kExitUsage);  // --checkpoint is required
  const fs::path dir = testing::scratch_dir("cli-binary");
  EXPECT_EQ(run_binary("train --config " + (dir / "absent.json").string()), kExitData);
}

TEST(CliBinary, SynthTrainEval) {
  const fs::path dir = testing::scratch_dir("cli-binary-run");
  ASSERT_EQ(run_binary("synth --preset mixed --size 40 --seed 2 --out " + (dir / "data").string()), kExitOk);
  write(dir / "cfg.json", json({{"profile", "synthetic"},
                                {"data",
                                 {{"dataset", "data/dataset.jsonl"},
                                  {"embeddings", "data/embeddings.txt"},
                                  {"entities", "data/entities.jsonl"}}},
                                {"hyper", {{"max_epochs", 2}}}})
                              .dump());
  const std::string cfg = "--config " + (dir / "cfg.json").string();
  ASSERT_EQ(run_binary("train " + cfg + " --out " + (dir / "run").string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "run/model.ckpt"));
  EXPECT_EQ(run_binary("eval " + cfg + " --split test --checkpoint " + (dir / "run/model.ckpt").string() + " --out " +
                       (dir / "run").string()),
            kExitOk);
  EXPECT_EQ(slurp(dir / "run/eval_metrics.json"), slurp(dir / "run/metrics.json"));
  EXPECT_EQ(run_binary("eval " + cfg + " --mode N+X --checkpoint " + (dir / "run/model.ckpt").string()), kExitUsage);
}

}  // namespace
}  // namespace dualcan
