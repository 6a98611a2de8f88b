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
#ifndef RESMAL_METRICS_H_
#define RESMAL_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace resmal {

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t support = 0;  // true samples of this class
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_recall = 0.0;
  size_t classes_scored = 0;  // classes entering the macro means
  std::vector<ClassScore> per_class;
  std::vector<std::vector<size_t>> confusion;  // [truth][predicted]
};

/// Precision, recall and F1 are 0 when their denominator is 0. Macro means
/// run over the classes that occur among the labels or the predictions.
ClassificationMetrics Classify(std::span<const size_t> predicted, std::span<const size_t> truth, size_t classes);

struct Split {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

/// Per-class seeded shuffle; the first round(train_frac * n_k) samples of
/// class k go to train. Both lists are returned in ascending index order.
Split StratifiedSplit(std::span<const size_t> labels, double train_frac, uint64_t seed);

}  // namespace resmal

#endif  // RESMAL_METRICS_H_
