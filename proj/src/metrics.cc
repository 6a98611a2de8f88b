/**
 * Copyright 2026 The resmal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "resmal/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "resmal/error.h"
#include "resmal/rng.h"

namespace resmal {

ClassificationMetrics Classify(std::span<const size_t> predicted, std::span<const size_t> truth, size_t classes) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction and label counts differ");
  }
  if (truth.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples to score");
  if (classes == 0) throw Error(ErrorCode::kInvalidArgument, "no classes");
  ClassificationMetrics m;
  m.confusion.assign(classes, std::vector<size_t>(classes, 0));
  size_t correct = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes || predicted[i] >= classes) {
      throw Error(ErrorCode::kLabelOutOfRange, "class id " + std::to_string(std::max(truth[i], predicted[i])));
    }
    ++m.confusion[truth[i]][predicted[i]];
    correct += truth[i] == predicted[i];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (size_t k = 0; k < classes; ++k) {
    size_t tp = m.confusion[k][k], pred = 0, actual = 0;
    for (size_t j = 0; j < classes; ++j) {
      pred += m.confusion[j][k];
      actual += m.confusion[k][j];
    }
    ClassScore s;
    s.support = actual;
    s.precision = pred ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
    s.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    if (actual + pred > 0) {
      m.macro_f1 += s.f1;
      m.macro_recall += s.recall;
      ++m.classes_scored;
    }
    m.per_class.push_back(s);
  }
  m.macro_f1 /= static_cast<double>(m.classes_scored);
  m.macro_recall /= static_cast<double>(m.classes_scored);
  return m;
}

Split StratifiedSplit(std::span<const size_t> labels, double train_frac, uint64_t seed) {
  if (!(train_frac >= 0.0 && train_frac <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must be in [0, 1]");
  }
  size_t classes = 0;
  for (const size_t l : labels) classes = std::max(classes, l + 1);
  Split split;
  for (size_t k = 0; k < classes; ++k) {
    std::vector<size_t> members;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == k) members.push_back(i);
    }
    SplitMix64 rng(MixSeed(seed, k));
    rng.Shuffle(std::span<size_t>(members));
    const auto n_train = static_cast<size_t>(std::lround(train_frac * static_cast<double>(members.size())));
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace resmal
