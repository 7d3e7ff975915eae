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

// Corpus records and their conversion to padded id blocks.
//
// Input is line-delimited JSON, one document per line:
//   {"id": "...", "label": 0|1, "news": "text",
//    "comments": ["text", ...],                       (chronological)
//    "entities": [{"name": "...", "description": "text or empty"}, ...]}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualcan/entities.hpp"
#include "dualcan/errors.hpp"
#include "dualcan/text.hpp"
#include "dualcan/types.hpp"
#include "dualcan/vocabulary.hpp"

namespace dualcan {

using Sentence = std::vector<std::string>;

struct EntityMention {
  std::string name;
  std::vector<Sentence> description;  // empty: not resolved yet
};

struct Document {
  std::string id;
  int label = 0;  // 1 = fake
  std::vector<Sentence> news;
  std::vector<std::vector<Sentence>> comments;  // per comment, chronological
  std::vector<EntityMention> entities;          // in document order
};

enum class ReadMode { Strict, Lenient };

struct DatasetReadResult {
  std::vector<Document> documents;
  std::vector<std::string> warnings;  // one per skipped line
};

/// Parses one JSON record. Throws DataError on schema violations.
inline Document parse_document(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  for (const char* key : {"id", "label", "news"}) {
    if (!j.contains(key)) throw DataError(std::string("missing required field '") + key + "'");
  }
  Document doc;
  const auto& id = j.at("id");
  if (id.is_string()) {
    doc.id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    doc.id = std::to_string(id.get<long long>());
  } else {
    throw DataError("field 'id' must be a string or integer");
  }
  const auto& label = j.at("label");
  if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1)) {
    throw DataError("field 'label' must be 0 or 1");
  }
  doc.label = static_cast<int>(label.get<long long>());
  if (!j.at("news").is_string()) throw DataError("field 'news' must be a string");
  doc.news = tokenize_text(j.at("news").get<std::string>());
  if (doc.news.empty()) throw DataError("document '" + doc.id + "' has no news sentence");

  if (j.contains("comments")) {
    const auto& comments = j.at("comments");
    if (!comments.is_array()) throw DataError("field 'comments' must be an array of strings");
    for (const auto& c : comments) {
      if (!c.is_string()) throw DataError("field 'comments' must be an array of strings");
      auto sentences = tokenize_text(c.get<std::string>());
      if (!sentences.empty()) doc.comments.push_back(std::move(sentences));
    }
  }
  if (j.contains("entities")) {
    const auto& entities = j.at("entities");
    if (!entities.is_array()) throw DataError("field 'entities' must be an array");
    for (const auto& e : entities) {
      if (!e.is_object() || !e.contains("name") || !e.at("name").is_string()) {
        throw DataError("entity records need a string 'name'");
      }
      EntityMention m;
      m.name = e.at("name").get<std::string>();
      if (e.contains("description")) {
        if (!e.at("description").is_string()) throw DataError("entity 'description' must be a string");
        m.description = tokenize_text(e.at("description").get<std::string>());
      }
      doc.entities.push_back(std::move(m));
    }
  }
  return doc;
}

/// Strict mode throws on the first bad line; lenient mode skips it and
/// records a warning naming the line.
inline DatasetReadResult read_dataset(std::istream& in, ReadMode mode = ReadMode::Strict) {
  DatasetReadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
      }
      result.documents.push_back(parse_document(j));
    } catch (const DataError& e) {
      const std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
      if (mode == ReadMode::Strict) throw DataError(msg);
      result.warnings.push_back(msg);
    }
  }
  return result;
}

inline DatasetReadResult read_dataset(const std::string& path, ReadMode mode = ReadMode::Strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(in, mode);
}

/// Fills empty entity descriptions from the resolver; documents without any
/// entity get the snapshot names found in their news text.
inline void attach_descriptions(std::vector<Document>& docs, const SnapshotResolver& resolver) {
  for (Document& doc : docs) {
    if (doc.entities.empty()) {
      std::string text;
      for (const Sentence& s : doc.news) {
        for (const std::string& w : s) text += w + ' ';
      }
      for (std::string& name : resolver.link(text)) doc.entities.push_back({std::move(name), {}});
    }
    for (EntityMention& m : doc.entities) {
      if (m.description.empty()) m.description = tokenize_text(resolver.describe(m.name));
    }
  }
}

/// Description sentences in entity order: at most `sentences_per_entity`
/// from each entity, at most `max_entity_sentences` overall.
inline std::vector<Sentence> resolve_entities(const Document& doc, const HyperParams& hp,
                                              const EntityResolver* resolver = nullptr) {
  std::vector<Sentence> out;
  for (const EntityMention& m : doc.entities) {
    std::vector<Sentence> resolved;
    const std::vector<Sentence>* description = &m.description;
    if (description->empty() && resolver != nullptr) {
      resolved = tokenize_text(resolver->describe(m.name));
      description = &resolved;
    }
    const std::size_t take = std::min(description->size(), hp.sentences_per_entity);
    for (std::size_t i = 0; i < take && out.size() < hp.max_entity_sentences; ++i) {
      out.push_back((*description)[i]);
    }
    if (out.size() >= hp.max_entity_sentences) break;
  }
  return out;
}

/// The first `max_comment_sentences` sentences, taking at most
/// `sentences_per_comment` from each comment in order.
inline std::vector<Sentence> comment_sentences(const Document& doc, const HyperParams& hp) {
  std::vector<Sentence> out;
  for (const auto& comment : doc.comments) {
    const std::size_t take = std::min(comment.size(), hp.sentences_per_comment);
    for (std::size_t i = 0; i < take && out.size() < hp.max_comment_sentences; ++i) out.push_back(comment[i]);
    if (out.size() >= hp.max_comment_sentences) break;
  }
  return out;
}

/// Truncates each sentence to `width` ids and the list to `rows` sentences;
/// the rest is <PAD> with a cleared mask.
inline SentenceBlock pack_sentences(std::span<const Sentence> sentences, const Vocabulary& vocab,
                                    std::size_t rows, std::size_t width) {
  SentenceBlock block(rows, width);
  std::size_t r = 0;
  for (const Sentence& s : sentences) {
    if (r == rows) break;
    if (s.empty()) continue;
    const std::size_t n = std::min(s.size(), width);
    for (std::size_t c = 0; c < n; ++c) block.at(r, c) = vocab.id(s[c]);
    block.mask[r] = true;
    ++r;
  }
  return block;
}

inline EncodedDocument encode_document(const Document& doc, const Vocabulary& vocab, const HyperParams& hp,
                                       const EntityResolver* resolver = nullptr) {
  EncodedDocument out;
  out.id = doc.id;
  out.label = doc.label;
  out.news = pack_sentences(doc.news, vocab, hp.max_news, hp.max_words);
  if (out.news.real_count() == 0) throw DataError("document '" + doc.id + "' has no news sentence");
  const std::vector<Sentence> entity = resolve_entities(doc, hp, resolver);
  out.entities = pack_sentences(entity, vocab, hp.max_entity_sentences, hp.max_words);
  const std::vector<Sentence> comments = comment_sentences(doc, hp);
  out.comments = pack_sentences(comments, vocab, hp.max_comment_sentences, hp.max_words);
  return out;
}

inline std::vector<EncodedDocument> encode_documents(std::span<const Document> docs, const Vocabulary& vocab,
                                                     const HyperParams& hp) {
  std::vector<EncodedDocument> out;
  out.reserve(docs.size());
  for (const Document& d : docs) out.push_back(encode_document(d, vocab, hp));
  return out;
}

/// Vocabulary over every token of the given documents, in first-seen order.
inline Vocabulary build_vocabulary(std::span<const Document> docs) {
  Vocabulary v;
  auto add_all = [&](const std::vector<Sentence>& sentences) {
    for (const Sentence& s : sentences) {
      for (const std::string& t : s) v.add(t);
    }
  };
  for (const Document& d : docs) {
    add_all(d.news);
    for (const auto& c : d.comments) add_all(c);
    for (const auto& e : d.entities) add_all(e.description);
  }
  return v;
}

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Per-label seeded shuffle, then 70% / 10% / rest. Index lists are sorted.
inline DatasetSplit stratified_split(std::span<const int> labels, std::uint64_t seed,
                                     double train_fraction = 0.7, double validation_fraction = 0.1) {
  DatasetSplit split;
  std::mt19937_64 rng(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[static_cast<std::size_t>(rng() % i)]);
    }
    const auto n = static_cast<double>(members.size());
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * n + 0.5));
    const auto n_val = std::min(members.size() - n_train,
                                static_cast<std::size_t>(std::floor(validation_fraction * n + 0.5)));
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& dst = k < n_train ? split.train : (k < n_train + n_val ? split.validation : split.test);
      dst.push_back(members[k]);
    }
  }
  for (auto* part : {&split.train, &split.validation, &split.test}) std::sort(part->begin(), part->end());
  return split;
}

template <typename T>
std::vector<T> select(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items[i]);
  return out;
}

/// Counts in the layout of the usual dataset statistics table.
struct DatasetStats {
  std::size_t total_news = 0;
  std::size_t true_news = 0;
  std::size_t fake_news = 0;
  std::size_t user_comments = 0;
  std::size_t entity_descriptions = 0;
};

inline DatasetStats dataset_stats(std::span<const Document> docs) {
  DatasetStats s;
  for (const Document& d : docs) {
    ++s.total_news;
    (d.label == 1 ? s.fake_news : s.true_news) += 1;
    s.user_comments += d.comments.size();
    for (const auto& e : d.entities) s.entity_descriptions += e.description.empty() ? 0 : 1;
  }
  return s;
}

inline nlohmann::json to_json(const DatasetStats& s) {
  return {{"total_news", s.total_news},
          {"true_news", s.true_news},
          {"fake_news", s.fake_news},
          {"user_comments", s.user_comments},
          {"entity_descriptions", s.entity_descriptions}};
}

}  // namespace dualcan
