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

// Checkpoint file layout (version 1):
//
//   DUALCAN-CHECKPOINT 1
//   hyper <key> <value>                 one line per hyperparameter
//   vocab <count>
//   <token>                             count lines, ids 2, 3, ...
//   tensor <name> <rows> <cols> <offset>
//   ...
//   payload <bytes>
//   <raw little-endian float64 data; offsets are relative to its start>
//
// The frozen embedding table is stored as the tensor "embeddings"; every
// other tensor is a model parameter.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dualcan/errors.hpp"
#include "dualcan/model.hpp"
#include "dualcan/tensor.hpp"
#include "dualcan/types.hpp"
#include "dualcan/vocabulary.hpp"

namespace dualcan {

inline constexpr const char* kCheckpointMagic = "DUALCAN-CHECKPOINT";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  HyperParams hyper;
  Vocabulary vocab;
  Tensor embeddings;
  ModelParams params;
};

namespace detail {

inline void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

inline double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  std::vector<std::pair<std::string, const Tensor*>> tensors;
  tensors.emplace_back("embeddings", &ckpt.embeddings);
  for (const Parameter* p : ckpt.params.parameters()) tensors.emplace_back(p->name, &p->value);

  std::ostringstream header;
  header << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  for (const auto& [k, v] : ckpt.hyper.to_map()) header << "hyper " << k << ' ' << v << '\n';
  const auto tokens = ckpt.vocab.corpus_tokens();
  header << "vocab " << tokens.size() << '\n';
  for (const auto& t : tokens) header << t << '\n';
  std::string payload;
  for (const auto& [name, t] : tensors) {
    header << "tensor " << name << ' ' << t->rows() << ' ' << t->cols() << ' ' << payload.size() << '\n';
    for (double v : t->data()) detail::put_f64(payload, v);
  }
  header << "payload " << payload.size() << '\n';
  out << header.str();
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw DataError("failed writing checkpoint");
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  save_checkpoint(out, ckpt);
}

namespace detail {

inline Checkpoint parse_checkpoint(std::istream& in) {
  auto fail = [](const std::string& why) -> DataError { return DataError("bad checkpoint: " + why); };
  std::string line;
  if (!std::getline(in, line)) throw fail("empty file");
  {
    std::istringstream first(line);
    std::string magic;
    int version = 0;
    first >> magic >> version;
    if (magic != kCheckpointMagic) throw fail("missing magic header");
    if (version != kCheckpointVersion) throw fail("unsupported version " + std::to_string(version));
  }

  Checkpoint ckpt;
  struct Entry {
    std::size_t rows, cols, offset;
  };
  std::map<std::string, Entry> directory;
  std::vector<std::string> order;
  std::size_t payload_size = 0;
  bool have_payload = false;
  while (!have_payload && std::getline(in, line)) {
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "hyper") {
      std::string key, value;
      fields >> key >> value;
      ckpt.hyper.set(key, value);
    } else if (kind == "vocab") {
      std::size_t n = 0;
      if (!(fields >> n)) throw fail("vocab count");
      std::vector<std::string> tokens(n);
      for (auto& t : tokens) {
        if (!std::getline(in, t)) throw fail("truncated vocabulary");
      }
      ckpt.vocab = Vocabulary::from_tokens(tokens);
    } else if (kind == "tensor") {
      std::string name;
      Entry e{};
      if (!(fields >> name >> e.rows >> e.cols >> e.offset)) throw fail("tensor entry '" + line + "'");
      if (directory.count(name)) throw fail("duplicate tensor " + name);
      directory[name] = e;
      order.push_back(name);
    } else if (kind == "payload") {
      if (!(fields >> payload_size)) throw fail("payload size");
      have_payload = true;
    } else {
      throw fail("unexpected header line '" + line + "'");
    }
  }
  if (!have_payload) throw fail("missing payload");
  std::vector<unsigned char> payload(payload_size);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload_size));
  if (static_cast<std::size_t>(in.gcount()) != payload_size) throw fail("truncated payload");

  auto read_tensor = [&](const std::string& name, Shape expected) {
    const auto it = directory.find(name);
    if (it == directory.end()) throw fail("missing tensor " + name);
    const Entry& e = it->second;
    if (e.rows != expected.rows || e.cols != expected.cols) {
      throw fail("tensor " + name + " has shape [" + std::to_string(e.rows) + "x" + std::to_string(e.cols) +
                 "], expected " + expected.str());
    }
    const std::size_t bytes = expected.size() * 8;
    if (e.offset + bytes > payload.size()) throw fail("tensor " + name + " runs past the payload");
    std::vector<double> values(expected.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = detail::get_f64(payload.data() + e.offset + 8 * i);
    return Tensor(expected, std::move(values));
  };

  ckpt.hyper.validate();
  ckpt.embeddings = read_tensor("embeddings", Shape{ckpt.vocab.size(), ckpt.hyper.embed_dim});
  ckpt.params = ModelParams(ckpt.hyper.embed_dim, ckpt.hyper.hidden);
  for (Parameter* p : ckpt.params.parameters()) {
    p->value = read_tensor(p->name, p->value.shape());
    p->grad = Tensor(p->value.shape());
  }
  if (directory.size() != ckpt.params.parameters().size() + 1) throw fail("unexpected extra tensors");
  return ckpt;
}

}  // namespace detail

/// Any malformed content surfaces as DataError.
inline Checkpoint load_checkpoint(std::istream& in) {
  try {
    return detail::parse_checkpoint(in);
  } catch (const ContractError& e) {
    throw DataError(std::string("bad checkpoint: ") + e.what());
  } catch (const NumericalError& e) {
    throw DataError(std::string("bad checkpoint: ") + e.what());
  }
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace dualcan
