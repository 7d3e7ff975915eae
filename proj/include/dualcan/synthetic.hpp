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

// Generated corpora whose label is recoverable only from chosen sources.
//
// Every document mentions an ambiguous name ("mercury", "atlas", ...) in its
// news text, drawn independently of the label. Cues, when enabled, are:
//   news      one sentence carries a tone word ("shocking" vs "announced")
//   comments  a later comment reads "fyi this story is fake" vs "... true"
//   entities  the first description sentence of the linked sense defines it
//             as a satirical/hoax outlet vs a government/national one
// Without a cue, the same slot is filled from a label-independent pool.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualcan/errors.hpp"

namespace dualcan {

struct SyntheticSpec {
  std::size_t size = 200;
  double fake_fraction = 0.5;
  bool cue_news = false;
  bool cue_comments = false;
  bool cue_entities = false;
  std::uint64_t seed = 7;
  std::size_t embed_dim = 16;

  /// "mixed" (all sources), "news", "comment" or "entity".
  static SyntheticSpec preset(const std::string& name) {
    SyntheticSpec s;
    if (name == "mixed") {
      s.cue_news = s.cue_comments = s.cue_entities = true;
    } else if (name == "news") {
      s.cue_news = true;
    } else if (name == "comment") {
      s.cue_comments = true;
    } else if (name == "entity") {
      s.cue_entities = true;
    } else {
      throw ContractError("unknown synthetic preset '" + name + "' (mixed, news, comment, entity)");
    }
    return s;
  }
};

/// File contents of a generated corpus.
struct SyntheticCorpus {
  std::string dataset;     // line-delimited JSON documents
  std::string snapshot;    // line-delimited JSON {name, description}
  std::string embeddings;  // text vectors for every template word
};

namespace synthetic_lexicon {

inline const std::vector<std::string>& filler() {
  static const std::vector<std::string> words = {
      "people", "said",    "today",   "city",    "report",  "week",   "story",   "video",    "photo",
      "post",   "share",   "read",    "local",   "team",    "game",   "music",   "film",     "star",
      "show",   "family",  "friends", "school",  "market",  "price",  "weather", "rain",     "travel",
      "food",   "health",  "study",   "data",    "plan",    "event",  "online",  "social",   "media",
      "update", "time",    "year",    "day",     "morning", "night",  "world",   "country",  "group",
      "member", "party",   "season",  "series",  "record",  "album",  "fans",    "interview", "release",
      "company", "product", "service", "life",   "home",    "street", "weekend", "crowd",    "stage"};
  return words;
}

// Sentence frames shared by both labels.
inline const std::vector<std::string>& outlet_nouns() {
  static const std::vector<std::string> w = {"website", "outlet", "organization", "group"};
  return w;
}
inline const std::vector<std::string>& topics() {
  static const std::vector<std::string> w = {"stories", "reports", "articles", "coverage"};
  return w;
}

inline const std::vector<std::string>& ambiguous_names() {
  static const std::vector<std::string> w = {"mercury", "jordan", "phoenix", "apollo", "atlas", "orion"};
  return w;
}
inline const std::vector<std::string>& place_names() {
  static const std::vector<std::string> w = {"riverton", "lakeside", "oakdale", "westfield"};
  return w;
}

// Label cues per source: [0] real, [1] fake.
inline const std::vector<std::string>& news_cues(int label) {
  static const std::vector<std::string> real = {"announced", "confirmed", "reported"};
  static const std::vector<std::string> fake = {"shocking", "unbelievable", "exposed"};
  return label == 1 ? fake : real;
}
inline const std::vector<std::string>& comment_cues(int label) {
  static const std::vector<std::string> real = {"true", "legit", "accurate"};
  static const std::vector<std::string> fake = {"fake", "debunked", "false"};
  return label == 1 ? fake : real;
}
inline const std::vector<std::string>& comment_neutral() {
  static const std::vector<std::string> w = {"interesting", "long", "old"};
  return w;
}
inline const std::vector<std::string>& entity_cues(int label) {
  static const std::vector<std::string> real = {"government", "national", "accredited"};
  static const std::vector<std::string> fake = {"satirical", "hoax", "parody"};
  return label == 1 ? fake : real;
}
inline const std::vector<std::string>& entity_neutral() {
  static const std::vector<std::string> w = {"large", "small", "regional"};
  return w;
}

inline const std::vector<std::string>& frame_words() {
  static const std::vector<std::string> w = {"is", "a", "known", "for", "fyi", "this", "town", "in", "north",
                                             "south", "."};
  return w;
}

}  // namespace synthetic_lexicon

namespace detail {

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  /// Integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  const std::string& pick(const std::vector<std::string>& pool) { return pool[between(0, pool.size() - 1)]; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

inline std::vector<std::string> filler_words(SynthRng& rng, std::size_t lo, std::size_t hi) {
  std::vector<std::string> w;
  const std::size_t n = rng.between(lo, hi);
  for (std::size_t i = 0; i < n; ++i) w.push_back(rng.pick(synthetic_lexicon::filler()));
  return w;
}

inline void insert_at_random(std::vector<std::string>& words, const std::string& w, SynthRng& rng) {
  const std::size_t pos = rng.between(0, words.size());
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), w);
}

// Sentences joined as "w w w. w w." so the splitter recovers them.
inline std::string paragraph(const std::vector<std::vector<std::string>>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += join(s) + '.';
  }
  return out;
}

}  // namespace detail

inline SyntheticCorpus gen_synthetic(const SyntheticSpec& spec) {
  namespace lex = synthetic_lexicon;
  if (spec.size == 0) throw ContractError("synthetic corpus size must be positive");
  if (!(spec.fake_fraction >= 0.0 && spec.fake_fraction <= 1.0)) {
    throw ContractError("fake fraction must lie in [0, 1]");
  }
  detail::SynthRng rng(spec.seed);

  const auto n_fake = static_cast<std::size_t>(std::floor(spec.fake_fraction * static_cast<double>(spec.size) + 0.5));
  std::vector<int> labels(spec.size, 0);
  for (std::size_t i = 0; i < n_fake; ++i) labels[i] = 1;
  for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.between(0, i - 1)]);

  std::map<std::string, std::string> snapshot;
  std::string dataset;
  for (std::size_t k = 0; k < spec.size; ++k) {
    const int label = labels[k];
    const std::string& surface = rng.pick(lex::ambiguous_names());
    const std::string& place = rng.pick(lex::place_names());

    // News: 2-4 sentences; the first names the ambiguous entity.
    std::vector<std::vector<std::string>> news;
    const std::size_t n_news = rng.between(2, 4);
    for (std::size_t i = 0; i < n_news; ++i) news.push_back(detail::filler_words(rng, 5, 8));
    detail::insert_at_random(news[0], surface, rng);
    if (spec.cue_news) {
      detail::insert_at_random(news[rng.between(0, n_news - 1)], rng.pick(lex::news_cues(label)), rng);
    }

    // Comments: 3-5, the cue (or its neutral stand-in) in the later half.
    const std::size_t n_comments = rng.between(3, 5);
    const std::size_t cue_at = rng.between(n_comments / 2, n_comments - 1);
    nlohmann::json comments = nlohmann::json::array();
    for (std::size_t i = 0; i < n_comments; ++i) {
      std::vector<std::vector<std::string>> sentences;
      if (i == cue_at) {
        const std::string& word = spec.cue_comments ? rng.pick(lex::comment_cues(label)) : rng.pick(lex::comment_neutral());
        sentences.push_back({"fyi", "this", "story", "is", word});
      } else {
        sentences.push_back(detail::filler_words(rng, 4, 7));
      }
      if (i > cue_at && rng.chance(0.3)) sentences.push_back(detail::filler_words(rng, 3, 6));
      comments.push_back(detail::paragraph(sentences));
    }

    // Entities: the linked sense of the ambiguous name, plus a place.
    auto describe = [&](std::vector<std::string> definition) {
      std::vector<std::vector<std::string>> sentences{std::move(definition)};
      const std::size_t extra = rng.between(1, 3);
      for (std::size_t i = 0; i < extra; ++i) sentences.push_back(detail::filler_words(rng, 4, 7));
      return detail::paragraph(sentences);
    };
    const std::string& quality = spec.cue_entities ? rng.pick(lex::entity_cues(label)) : rng.pick(lex::entity_neutral());
    const std::string sense_name =
        surface + (spec.cue_entities ? (label == 1 ? " (satire)" : " (agency)") : " (outlet)");
    const std::string sense_text =
        describe({surface, "is", "a", quality, rng.pick(lex::outlet_nouns()), "known", "for", rng.pick(lex::topics())});
    const std::string place_text = describe({place, "is", "a", "town", "in", rng.chance(0.5) ? "north" : "south"});
    snapshot[sense_name] = sense_text;
    snapshot[place] = place_text;

    nlohmann::json entities = nlohmann::json::array();
    const nlohmann::json sense = {{"name", sense_name}, {"description", sense_text}};
    const nlohmann::json town = {{"name", place}, {"description", place_text}};
    if (rng.chance(0.5)) {
      entities.push_back(sense);
      entities.push_back(town);
    } else {
      entities.push_back(town);
      entities.push_back(sense);
    }
    detail::insert_at_random(news[news.size() - 1], place, rng);

    char id[32];
    std::snprintf(id, sizeof(id), "syn-%04zu", k);
    const nlohmann::json record = {{"id", id},
                                   {"label", label},
                                   {"news", detail::paragraph(news)},
                                   {"comments", comments},
                                   {"entities", entities}};
    dataset += record.dump() + '\n';
  }

  SyntheticCorpus corpus;
  corpus.dataset = std::move(dataset);
  // snapshot descriptions vary per document; the last one generated wins
  for (const auto& [name, text] : snapshot) {
    corpus.snapshot += nlohmann::json({{"name", name}, {"description", text}}).dump() + '\n';
  }

  std::set<std::string> words;
  auto take = [&](const std::vector<std::string>& pool) { words.insert(pool.begin(), pool.end()); };
  take(lex::filler());
  take(lex::outlet_nouns());
  take(lex::topics());
  take(lex::ambiguous_names());
  take(lex::place_names());
  take(lex::comment_neutral());
  take(lex::entity_neutral());
  take(lex::frame_words());
  for (int label : {0, 1}) {
    take(lex::news_cues(label));
    take(lex::comment_cues(label));
    take(lex::entity_cues(label));
  }
  char buf[32];
  for (const std::string& w : words) {
    corpus.embeddings += w;
    for (std::size_t d = 0; d < spec.embed_dim; ++d) {
      std::snprintf(buf, sizeof(buf), " %.6f", 2.0 * rng.unit() - 1.0);
      corpus.embeddings += buf;
    }
    corpus.embeddings += '\n';
  }
  return corpus;
}

struct SyntheticPaths {
  std::filesystem::path dataset;
  std::filesystem::path snapshot;
  std::filesystem::path embeddings;
};

inline SyntheticPaths write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SyntheticPaths paths{dir / "dataset.jsonl", dir / "entities.jsonl", dir / "embeddings.txt"};
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    out << text;
  };
  write(paths.dataset, corpus.dataset);
  write(paths.snapshot, corpus.snapshot);
  write(paths.embeddings, corpus.embeddings);
  return paths;
}

}  // namespace dualcan
