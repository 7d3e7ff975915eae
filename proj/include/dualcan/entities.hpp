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

// Entity descriptions. The network only needs "name -> description text";
// where that text comes from is behind EntityResolver. SnapshotResolver
// serves a local line-delimited JSON dump of {name, description} records.

#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualcan/errors.hpp"
#include "dualcan/text.hpp"

namespace dualcan {

/// Lowercase with runs of whitespace collapsed to one space, trimmed.
inline std::string normalize_entity_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : detail::trim(name)) {
    if (detail::is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

class EntityResolver {
 public:
  virtual ~EntityResolver() = default;

  /// Description text for an entity; empty when unknown.
  [[nodiscard]] virtual std::string describe(std::string_view name) const = 0;
};

class SnapshotResolver final : public EntityResolver {
 public:
  SnapshotResolver() = default;

  static SnapshotResolver load(std::istream& in) {
    SnapshotResolver r;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        r.add(j.at("name").get<std::string>(), j.at("description").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw DataError("entity snapshot line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return r;
  }

  static SnapshotResolver load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open entity snapshot '" + path + "'");
    return load(in);
  }

  /// Later records for the same normalized name replace earlier ones.
  void add(std::string_view name, std::string description) {
    const std::string key = normalize_entity_name(name);
    if (key.empty()) throw DataError("entity snapshot record with empty name");
    if (!entries_.count(key)) names_.emplace_back(name);
    entries_[key] = std::move(description);
  }

  [[nodiscard]] std::string describe(std::string_view name) const override {
    const auto it = entries_.find(normalize_entity_name(name));
    return it == entries_.end() ? std::string() : it->second;
  }

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  /// Gazetteer linking: snapshot names whose token sequence occurs in
  /// `text`, ordered by first occurrence (longer names win ties).
  [[nodiscard]] std::vector<std::string> link(std::string_view text) const {
    const std::vector<std::string> words = tokenize(text);
    struct Hit {
      std::size_t position;
      std::size_t length;
      std::string name;
    };
    std::vector<Hit> hits;
    for (const std::string& name : names_) {
      const std::vector<std::string> pattern = tokenize(name);
      if (pattern.empty() || pattern.size() > words.size()) continue;
      for (std::size_t i = 0; i + pattern.size() <= words.size(); ++i) {
        if (std::equal(pattern.begin(), pattern.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
          hits.push_back({i, pattern.size(), name});
          break;
        }
      }
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.position != b.position ? a.position < b.position : a.length > b.length;
    });
    std::vector<std::string> out;
    for (auto& h : hits) out.push_back(std::move(h.name));
    return out;
  }

 private:
  std::map<std::string, std::string> entries_;
  std::vector<std::string> names_;
};

}  // namespace dualcan
