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

// Hand-tallied metric fixtures shared by the unit and acceptance suites.

#pragma once

#include <vector>

namespace dualcan::testing {

struct ClassificationFixture {
  std::vector<int> preds;
  std::vector<int> labels;
  std::size_t tp, fp, tn, fn;
  double accuracy;
  double precision_pos, recall_pos, f1_pos;
  double precision_macro, recall_macro, f1_macro;
};

// tp = 3, fp = 2, fn = 1, tn = 4
// fake: P 3/5, R 3/4, F1 2/3; real: P 4/5, R 4/6, F1 8/11
inline ClassificationFixture classification_fixture() {
  return {{1, 1, 1, 1, 0, 0, 0, 0, 1, 0},
          {1, 1, 0, 0, 1, 0, 0, 0, 1, 0},
          3, 2, 4, 1,
          7.0 / 10.0,
          3.0 / 5.0, 3.0 / 4.0, 2.0 / 3.0,
          7.0 / 10.0, 17.0 / 24.0, 23.0 / 33.0};
}

struct RankingFixture {
  std::vector<double> scores;
  std::vector<int> labels;
  double average_precision;
};

// ranking 5, 1, 2, 4, 0, 3 (the tie keeps input order): positives at ranks
// 3, 4, 5 give (1/3 + 2/4 + 3/5) / 3
inline RankingFixture ranking_fixture() {
  return {{0.3, 0.8, 0.8, 0.1, 0.5, 0.9}, {1, 0, 1, 0, 1, 0}, 43.0 / 90.0};
}

}  // namespace dualcan::testing
