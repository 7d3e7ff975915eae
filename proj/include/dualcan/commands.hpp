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

// The dualcan subcommands as library calls. Each cmd_* returns the process
// exit code and reports errors on `err`; the run_* variants throw instead.
//
// Run configuration is a JSON file. Relative paths are resolved against the
// file's directory:
//
//   {
//     "profile": "synthetic",
//     "mode": "N+C+E",
//     "out": "runs/mixed",
//     "data": {"dataset": "dataset.jsonl",          single file, seeded split
//              "train": "...", "validation": "...", "test": "...",   or these
//              "embeddings": "embeddings.txt",
//              "entities": "entities.jsonl"},        optional snapshot
//     "hyper": {"learning_rate": 0.005, "seed": 3}
//   }

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualcan/checkpoint.hpp"
#include "dualcan/dataset.hpp"
#include "dualcan/embeddings.hpp"
#include "dualcan/entities.hpp"
#include "dualcan/errors.hpp"
#include "dualcan/metrics.hpp"
#include "dualcan/model.hpp"
#include "dualcan/synthetic.hpp"
#include "dualcan/train.hpp"
#include "dualcan/types.hpp"
#include "dualcan/vocabulary.hpp"

namespace dualcan {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Flag values; anything set here wins over the config file.
struct CommandOptions {
  std::optional<fs::path> config;
  std::optional<std::string> profile;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;

  std::optional<fs::path> dataset;
  std::optional<fs::path> embeddings;
  std::optional<fs::path> entities;
  std::optional<fs::path> checkpoint;
  std::string split = "all";  // eval / explain: all, train, validation or test
  std::vector<std::string> ids;

  std::string preset = "mixed";  // synth
  std::size_t size = 200;
  double fake_fraction = 0.5;
  std::size_t embed_dim = 16;
};

struct RunConfig {
  std::optional<fs::path> dataset;
  std::optional<fs::path> train_file;
  std::optional<fs::path> validation_file;
  std::optional<fs::path> test_file;
  std::optional<fs::path> embeddings;
  std::optional<fs::path> entities;
  std::string profile = "gossipcop";
  HyperParams hyper = HyperParams::gossipcop();
  bool hyper_given = false;  // a profile or hyper block was supplied
  InputMode mode = InputMode::Full;
  fs::path out = "dualcan-run";
};

namespace detail {

inline void require_file(const std::optional<fs::path>& p, const char* what) {
  if (p && !fs::exists(*p)) throw DataError(std::string(what) + " '" + p->string() + "' does not exist");
}

inline std::string hyper_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ContractError("hyperparameter values must be numbers or strings");
}

}  // namespace detail

inline RunConfig resolve_config(const CommandOptions& opt) {
  RunConfig rc;
  nlohmann::json hyper_block = nlohmann::json::object();
  std::optional<std::string> mode_text;
  if (opt.config) {
    std::ifstream in(*opt.config);
    if (!in) throw DataError("cannot open config '" + opt.config->string() + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ContractError("config '" + opt.config->string() + "': " + e.what());
    }
    if (!j.is_object()) throw ContractError("config must be a JSON object");
    const fs::path base = opt.config->parent_path();
    auto path_of = [&](const nlohmann::json& v, const char* key) -> std::optional<fs::path> {
      if (!v.contains(key)) return std::nullopt;
      if (!v.at(key).is_string()) throw ContractError(std::string("config field '") + key + "' must be a path");
      const fs::path p = v.at(key).get<std::string>();
      return p.is_absolute() ? p : base / p;
    };
    for (const auto& [key, value] : j.items()) {
      if (key != "profile" && key != "mode" && key != "out" && key != "data" && key != "hyper") {
        throw ContractError("unknown config field '" + key + "'");
      }
    }
    if (j.contains("profile")) {
      rc.profile = j.at("profile").get<std::string>();
      rc.hyper_given = true;
    }
    if (j.contains("mode")) mode_text = j.at("mode").get<std::string>();
    if (auto p = path_of(j, "out")) rc.out = *p;
    if (j.contains("data")) {
      const auto& d = j.at("data");
      if (!d.is_object()) throw ContractError("config field 'data' must be an object");
      rc.dataset = path_of(d, "dataset");
      rc.train_file = path_of(d, "train");
      rc.validation_file = path_of(d, "validation");
      rc.test_file = path_of(d, "test");
      rc.embeddings = path_of(d, "embeddings");
      rc.entities = path_of(d, "entities");
    }
    if (j.contains("hyper")) {
      hyper_block = j.at("hyper");
      if (!hyper_block.is_object()) throw ContractError("config field 'hyper' must be an object");
      rc.hyper_given = true;
    }
  }
  if (opt.profile) {
    rc.profile = *opt.profile;
    rc.hyper_given = true;
  }
  if (opt.mode) mode_text = *opt.mode;
  if (opt.out) rc.out = *opt.out;
  if (opt.dataset) rc.dataset = *opt.dataset;
  if (opt.embeddings) rc.embeddings = *opt.embeddings;
  if (opt.entities) rc.entities = *opt.entities;

  rc.hyper = HyperParams::profile(rc.profile);
  for (const auto& [key, value] : hyper_block.items()) rc.hyper.set(key, detail::hyper_text(value));
  if (opt.seed) rc.hyper.seed = *opt.seed;
  rc.hyper.validate();
  if (mode_text) rc.mode = parse_mode(*mode_text);

  detail::require_file(rc.dataset, "dataset");
  detail::require_file(rc.train_file, "train file");
  detail::require_file(rc.validation_file, "validation file");
  detail::require_file(rc.test_file, "test file");
  detail::require_file(rc.embeddings, "embeddings file");
  detail::require_file(rc.entities, "entity snapshot");
  return rc;
}

/// Documents of one file with entity descriptions filled from the snapshot.
inline std::vector<Document> load_documents(const fs::path& path, const std::optional<fs::path>& snapshot) {
  std::vector<Document> docs = read_dataset(path.string()).documents;
  if (snapshot) attach_descriptions(docs, SnapshotResolver::load(snapshot->string()));
  return docs;
}

struct RunSplits {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
};

/// Explicit split files when configured, otherwise the stratified split of
/// the single dataset under the run seed.
inline RunSplits load_splits(const RunConfig& rc) {
  RunSplits s;
  if (rc.train_file || rc.validation_file || rc.test_file) {
    if (!rc.train_file || !rc.validation_file) {
      throw ContractError("split files need at least 'train' and 'validation'");
    }
    s.train = load_documents(*rc.train_file, rc.entities);
    s.validation = load_documents(*rc.validation_file, rc.entities);
    if (rc.test_file) s.test = load_documents(*rc.test_file, rc.entities);
    return s;
  }
  if (!rc.dataset) throw ContractError("no dataset configured (set data.dataset or --dataset)");
  const std::vector<Document> docs = load_documents(*rc.dataset, rc.entities);
  std::vector<int> labels;
  for (const Document& d : docs) labels.push_back(d.label);
  const DatasetSplit split = stratified_split(labels, rc.hyper.seed);
  s.train = select<Document>(docs, split.train);
  s.validation = select<Document>(docs, split.validation);
  s.test = select<Document>(docs, split.test);
  return s;
}

inline std::vector<EncodedDocument> encode_for_mode(std::span<const Document> docs, const Vocabulary& vocab,
                                                    const HyperParams& hp, InputMode mode) {
  std::vector<EncodedDocument> out = encode_documents(docs, vocab, hp);
  for (EncodedDocument& d : out) d = ablate(std::move(d), mode);
  return out;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + p.string() + "'");
}

inline std::string epoch_csv_header() {
  return "epoch,train_loss,val_loss,val_accuracy,val_precision_pos,val_recall_pos,val_f1_pos,"
         "val_precision_macro,val_recall_macro,val_f1_macro,val_pr_auc,improved\n";
}

inline std::string epoch_csv_row(const EpochLog& e) {
  const MetricsReport& m = e.validation;
  std::string row = std::to_string(e.epoch);
  for (double v : {e.train_loss, e.validation_loss, m.accuracy, m.precision_pos, m.recall_pos, m.f1_pos, m.precision_macro,
                   m.recall_macro, m.f1_macro}) {
    row += ',' + fmt(v);
  }
  row += ',' + (m.pr_auc ? fmt(*m.pr_auc) : std::string());
  row += e.improved ? ",1\n" : ",0\n";
  return row;
}

}  // namespace detail

struct TrainOutcome {
  fs::path checkpoint;
  fs::path initial_checkpoint;
  fs::path epoch_log;
  fs::path metrics;
  TrainResult result;
  MetricsReport test;
};

/// Writes initial.ckpt, model.ckpt (best validation epoch), epochs.csv and
/// metrics.json (test split) under the output directory.
inline TrainOutcome run_train(const RunConfig& rc, std::ostream& log) {
  const HyperParams& hp = rc.hyper;
  if (!rc.embeddings) throw ContractError("no embeddings configured (set data.embeddings or --embeddings)");
  const RunSplits splits = load_splits(rc);
  if (splits.test.empty()) throw DataError("the test split is empty");

  const Vocabulary vocab = build_vocabulary(splits.train);
  const Tensor embeddings = load_embeddings(rc.embeddings->string(), vocab, hp.embed_dim);
  const auto train_set = encode_for_mode(splits.train, vocab, hp, rc.mode);
  const auto validation_set = encode_for_mode(splits.validation, vocab, hp, rc.mode);
  const auto test_set = encode_for_mode(splits.test, vocab, hp, rc.mode);
  log << "train " << train_set.size() << " / validation " << validation_set.size() << " / test "
      << test_set.size() << ", vocabulary " << vocab.size() << ", mode " << to_string(rc.mode) << '\n';

  TrainOutcome out;
  fs::create_directories(rc.out);
  out.initial_checkpoint = rc.out / "initial.ckpt";
  out.checkpoint = rc.out / "model.ckpt";
  out.epoch_log = rc.out / "epochs.csv";
  out.metrics = rc.out / "metrics.json";

  Checkpoint ckpt{hp, vocab, embeddings, ModelParams::initialized(hp.embed_dim, hp.hidden, hp.seed)};
  save_checkpoint(out.initial_checkpoint.string(), ckpt);

  std::string csv = detail::epoch_csv_header();
  out.result = train(train_set, validation_set, embeddings, hp, ckpt.params, [&](const EpochLog& e) {
    csv += detail::epoch_csv_row(e);
    log << "epoch " << e.epoch << " loss " << detail::fmt(e.train_loss) << " val_f1_macro "
        << detail::fmt(e.validation.f1_macro) << (e.improved ? " *" : "") << '\n';
  });
  detail::write_text(out.epoch_log, csv);

  ckpt.params = out.result.best;
  save_checkpoint(out.checkpoint.string(), ckpt);
  out.test = evaluate(ckpt.params, test_set, embeddings).metrics;
  detail::write_text(out.metrics, to_json(out.test).dump(2) + '\n');
  log << "best epoch " << out.result.best_epoch << ", test accuracy " << detail::fmt(out.test.accuracy) << '\n';
  return out;
}

/// Checkpoint hyperparameters, checked against any the caller configured.
inline HyperParams checked_hyper(const Checkpoint& ckpt, const RunConfig& rc) {
  if (rc.hyper_given && !rc.hyper.same_architecture(ckpt.hyper)) {
    throw ContractError("configured hyperparameters do not match the checkpoint's encoding");
  }
  return ckpt.hyper;
}

/// Documents for eval/explain: the whole dataset, or one split of it
/// recomputed with the checkpoint's seed.
inline std::vector<Document> documents_for(const RunConfig& rc, const HyperParams& hp, const std::string& split) {
  if (split == "all") {
    if (rc.dataset) return load_documents(*rc.dataset, rc.entities);
    if (rc.test_file) return load_documents(*rc.test_file, rc.entities);
    throw ContractError("no dataset configured (set data.dataset or --dataset)");
  }
  if (split != "train" && split != "validation" && split != "test") {
    throw ContractError("unknown split '" + split + "' (expected all, train, validation or test)");
  }
  RunConfig seeded = rc;
  seeded.hyper.seed = hp.seed;
  RunSplits s = load_splits(seeded);
  if (split == "train") return std::move(s.train);
  if (split == "validation") return std::move(s.validation);
  return std::move(s.test);
}

inline Checkpoint require_checkpoint(const CommandOptions& opt) {
  if (!opt.checkpoint) throw ContractError("--checkpoint is required");
  return load_checkpoint(opt.checkpoint->string());
}

inline MetricsReport run_eval(const CommandOptions& opt, std::ostream& log) {
  RunConfig rc = resolve_config(opt);
  Checkpoint ckpt = require_checkpoint(opt);
  const HyperParams hp = checked_hyper(ckpt, rc);
  if (opt.seed) ckpt.hyper.seed = *opt.seed;
  const std::vector<Document> docs = documents_for(rc, ckpt.hyper, opt.split);
  const auto encoded = encode_for_mode(docs, ckpt.vocab, hp, rc.mode);
  const MetricsReport m = evaluate(ckpt.params, encoded, ckpt.embeddings).metrics;
  const std::string text = to_json(m).dump(2) + '\n';
  detail::write_text(rc.out / "eval_metrics.json", text);
  log << text;
  return m;
}

// ---------------------------------------------------------------------------
// Attention heatmaps

struct HeatmapColumn {
  std::string label;
  std::vector<double> weights;
  std::vector<bool> mask;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Gray level of one cell: 0 (black) for the column maximum, 255 for zero.
/// Masked cells are drawn white.
inline int heatmap_gray(double weight, double column_max) {
  if (!(column_max > 0.0)) return 255;
  const double shade = std::clamp(weight / column_max, 0.0, 1.0);
  return static_cast<int>(std::lround(255.0 * (1.0 - shade)));
}

/// One column per sample, one row per sentence index (top = index 0).
inline std::string heatmap_svg(const std::string& title, const std::vector<HeatmapColumn>& columns) {
  constexpr int cell_w = 28, cell_h = 16, left = 36, top = 48, label_h = 14;
  std::size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.weights.size());
  const int width = left + cell_w * static_cast<int>(columns.size()) + 12;
  const int height = top + cell_h * static_cast<int>(rows) + 12;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"4\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(title)
      << "</text>\n";
  for (std::size_t r = 0; r < rows; ++r) {
    svg << "<text x=\"4\" y=\"" << top + cell_h * static_cast<int>(r) + cell_h - 4
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << r << "</text>\n";
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const HeatmapColumn& col = columns[c];
    const int x = left + cell_w * static_cast<int>(c);
    svg << "<text x=\"" << x << "\" y=\"" << top - label_h << "\" font-family=\"sans-serif\" font-size=\"8\" "
        << "transform=\"rotate(-30 " << x << ' ' << top - label_h << ")\">" << detail::xml_escape(col.label)
        << "</text>\n";
    double column_max = 0.0;
    for (std::size_t r = 0; r < col.weights.size(); ++r) {
      if (col.mask[r]) column_max = std::max(column_max, col.weights[r]);
    }
    for (std::size_t r = 0; r < col.weights.size(); ++r) {
      const int gray = col.mask[r] ? heatmap_gray(col.weights[r], column_max) : 255;
      svg << "<rect x=\"" << x << "\" y=\"" << top + cell_h * static_cast<int>(r) << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"rgb(" << gray << ',' << gray << ',' << gray
          << ")\" stroke=\"#cccccc\" stroke-width=\"0.5\"><title>" << detail::fmt(col.weights[r])
          << (col.mask[r] ? "" : " (padding)") << "</title></rect>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

struct ExplainOutcome {
  nlohmann::json report;
  std::vector<fs::path> heatmaps;
};

inline nlohmann::json mask_json(const std::vector<bool>& mask) {
  nlohmann::json out = nlohmann::json::array();
  for (bool b : mask) out.push_back(b ? 1 : 0);
  return out;
}

/// attention.json plus one heatmap per attention family. Unknown ids are
/// listed under "skipped"; it is an error only when none is found.
inline ExplainOutcome run_explain(const CommandOptions& opt, std::ostream& log) {
  RunConfig rc = resolve_config(opt);
  Checkpoint ckpt = require_checkpoint(opt);
  const HyperParams hp = checked_hyper(ckpt, rc);
  if (opt.seed) ckpt.hyper.seed = *opt.seed;
  const std::vector<Document> docs = documents_for(rc, ckpt.hyper, opt.split);

  std::vector<std::string> wanted = opt.ids;
  if (wanted.empty()) {
    for (const Document& d : docs) wanted.push_back(d.id);
  }
  ExplainOutcome out;
  nlohmann::json samples = nlohmann::json::array();
  nlohmann::json skipped = nlohmann::json::array();
  std::vector<HeatmapColumn> news_entity, entity, news_comment, comment;
  for (const std::string& id : wanted) {
    const auto it = std::find_if(docs.begin(), docs.end(), [&](const Document& d) { return d.id == id; });
    if (it == docs.end()) {
      skipped.push_back(id);
      continue;
    }
    const EncodedDocument doc = ablate(encode_document(*it, ckpt.vocab, hp), rc.mode);
    const Prediction p = predict(doc, ckpt.embeddings, ckpt.params);
    const AttentionReport& a = p.attention;
    samples.push_back({{"id", id},
                       {"label", doc.label},
                       {"prediction", p.label},
                       {"probabilities", {p.probabilities[0], p.probabilities[1]}},
                       {"news_entity", a.news_entity},
                       {"entity", a.entity},
                       {"news_comment", a.news_comment},
                       {"comment", a.comment},
                       {"news_mask", mask_json(a.news_mask)},
                       {"entity_mask", mask_json(a.entity_mask)},
                       {"comment_mask", mask_json(a.comment_mask)}});
    news_entity.push_back({id, a.news_entity, a.news_mask});
    entity.push_back({id, a.entity, a.entity_mask});
    news_comment.push_back({id, a.news_comment, a.news_mask});
    comment.push_back({id, a.comment, a.comment_mask});
  }
  if (samples.empty()) throw DataError("none of the requested ids is in the dataset");

  out.report = {{"mode", to_string(rc.mode)}, {"samples", samples}, {"skipped", skipped}};
  fs::create_directories(rc.out);
  detail::write_text(rc.out / "attention.json", out.report.dump(2) + '\n');
  const std::pair<const char*, const std::vector<HeatmapColumn>*> maps[] = {
      {"news_entity", &news_entity}, {"entity", &entity}, {"news_comment", &news_comment}, {"comment", &comment}};
  for (const auto& [name, columns] : maps) {
    const fs::path p = rc.out / (std::string("attention_") + name + ".svg");
    detail::write_text(p, heatmap_svg(std::string("attention: ") + name, *columns));
    out.heatmaps.push_back(p);
  }
  log << "explained " << samples.size() << " sample(s), skipped " << skipped.size() << "; wrote "
      << (rc.out / "attention.json").string() << '\n';
  return out;
}

inline SyntheticPaths run_synth(const CommandOptions& opt, std::ostream& log) {
  SyntheticSpec spec = SyntheticSpec::preset(opt.preset);
  spec.size = opt.size;
  spec.fake_fraction = opt.fake_fraction;
  spec.embed_dim = opt.embed_dim;
  if (opt.seed) spec.seed = *opt.seed;
  const fs::path dir = opt.out.value_or(fs::path("synthetic"));
  const SyntheticPaths paths = write_synthetic(gen_synthetic(spec), dir);
  log << "wrote " << spec.size << " documents (" << opt.preset << ") to " << dir.string() << '\n';
  return paths;
}

/// stats.json (corpus counts) and vocab.txt (training vocabulary, one token
/// per line in id order).
inline DatasetStats run_preprocess(const CommandOptions& opt, std::ostream& log) {
  const RunConfig rc = resolve_config(opt);
  std::vector<Document> all;
  if (rc.dataset) {
    all = load_documents(*rc.dataset, rc.entities);
  } else {
    const RunSplits s = load_splits(rc);
    for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(all.end(), part->begin(), part->end());
  }
  const DatasetStats stats = dataset_stats(all);
  const RunSplits s = load_splits(rc);
  const Vocabulary vocab = build_vocabulary(s.train);
  std::string vocab_text;
  for (std::size_t i = 0; i < vocab.size(); ++i) vocab_text += vocab.token(static_cast<TokenId>(i)) + '\n';
  fs::create_directories(rc.out);
  detail::write_text(rc.out / "stats.json", to_json(stats).dump(2) + '\n');
  detail::write_text(rc.out / "vocab.txt", vocab_text);
  log << to_json(stats).dump() << '\n';
  return stats;
}

/// Maps the error taxonomy onto exit codes.
template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ContractError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

inline int cmd_train(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded([&] { run_train(resolve_config(opt), out); }, err);
}

inline int cmd_eval(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded([&] { run_eval(opt, out); }, err);
}

inline int cmd_explain(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded([&] { run_explain(opt, out); }, err);
}

inline int cmd_synth(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded([&] { run_synth(opt, out); }, err);
}

inline int cmd_preprocess(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded([&] { run_preprocess(opt, out); }, err);
}

}  // namespace dualcan
