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

#include <cerrno>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/tensor.hpp"
#include "dualcan/vocabulary.hpp"

namespace dualcan {

/// Reads GloVe-style text vectors ("token v1 ... vd" per line) into a
/// [|V| x d] table. Rows of tokens missing from the file, and the <PAD>/<OOV>
/// rows, stay zero. The width comes from the first line and must equal
/// `expected_dim` when given.
inline Tensor load_embeddings(std::istream& in, const Vocabulary& vocab,
                              std::optional<std::size_t> expected_dim = std::nullopt) {
  std::optional<std::size_t> dim = expected_dim;
  std::vector<std::pair<TokenId, std::vector<double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || errno == ERANGE || !std::isfinite(v)) {
        throw DataError("embeddings line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
      values.push_back(v);
    }
    if (values.empty()) throw DataError("embeddings line " + std::to_string(line_no) + ": no vector");
    if (first && !dim) dim = values.size();
    first = false;
    if (values.size() != *dim) {
      throw DataError("embeddings line " + std::to_string(line_no) + ": expected " + std::to_string(*dim) +
                      " values, found " + std::to_string(values.size()));
    }
    if (vocab.contains(token)) rows.emplace_back(vocab.id(token), std::move(values));
  }
  if (!dim) throw DataError("embeddings file is empty");
  Tensor table(Shape{vocab.size(), *dim});
  for (const auto& [id, values] : rows) {
    for (std::size_t k = 0; k < *dim; ++k) table(static_cast<std::size_t>(id), k) = values[k];
  }
  return table;
}

inline Tensor load_embeddings(const std::string& path, const Vocabulary& vocab,
                              std::optional<std::size_t> expected_dim = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file '" + path + "'");
  return load_embeddings(in, vocab, expected_dim);
}

}  // namespace dualcan
