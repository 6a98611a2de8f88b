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
#ifndef RESMAL_RESWARE_H_
#define RESMAL_RESWARE_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resmal/io.h"
#include "resmal/nnkernel.h"

namespace resmal {

/// Learnable parameters per layer plus their sum.
struct ParamProfile {
  std::vector<uint64_t> per_layer;
  uint64_t total = 0;

  friend bool operator==(const ParamProfile &, const ParamProfile &) = default;
};

/// Conv: (w*h*p + 1)*c. Dense/Softmax: n_c*n_p + n_c. Others: 0.
/// Throws UnresolvedShape when p or n_p has not been filled in.
uint64_t CountLayerParams(const LayerSpec &layer);

ParamProfile CountModelParams(const ModelSpec &spec);

struct MemoryQuery {
  ParamProfile profile;
  uint64_t n_batches = 1;
  uint64_t batch_size = 1;
  uint64_t kb_per_param = 1;
};

/// n_batches * batch_size * total * kb_per_param * 1024 bytes. Overflow past
/// 64 bits throws Overflow.
uint64_t EstimateModelMemory(const MemoryQuery &query);

/// The same estimate applied to each layer's own count.
std::vector<uint64_t> EstimateLayerMemory(const MemoryQuery &query);

inline bool FitsOnDevice(uint64_t model_bytes, uint64_t node_free_bytes) { return model_bytes <= node_free_bytes; }

inline constexpr size_t kNumFeatures = 7;
using FeatureVector = std::array<double, kNumFeatures>;

const std::array<std::string, kNumFeatures> &FeatureNames();

// [total_params, total_weights, total_biases, total_activations,
//  res_model_bytes, res_node_bytes, res_node_minus_model]
FeatureVector OffloadFeatures(const ModelSpec &spec, uint64_t node_free_bytes, uint64_t n_batches,
                              uint64_t batch_size, uint64_t kb_per_param = 1);

struct RegressorDataset {
  std::vector<FeatureVector> features;
  std::vector<int> labels;  // 1 = fits on device
};

/// Random specs paired with random node capacities, labeled by FitsOnDevice.
/// Node capacity is drawn relative to the model estimate: about a fifth of
/// the samples sit exactly on the boundary, a few have no free memory.
RegressorDataset BuildRegressorDataset(uint64_t seed, size_t n_samples);

struct RegressorModel {
  std::vector<double> beta;  // beta[0] is the intercept; empty when unfitted
  std::array<std::string, kNumFeatures> feature_names = FeatureNames();
  FeatureVector mean{};   // of sign(x) * log1p(|x|) over the training set
  FeatureVector scale{};  // standard deviation of the same
  bool degenerate = false;  // no feature varied in training; scores are 0.5

  bool fitted() const { return beta.size() == kNumFeatures + 1; }
  friend bool operator==(const RegressorModel &, const RegressorModel &) = default;
};

struct FitConfig {
  size_t iterations = 500;
  double learning_rate = 0.1;
};

/// Logistic regression by full-batch gradient descent. Each feature is
/// compressed to sign(x) * log1p(|x|), then standardized. Throws DegenerateLabels unless both labels occur.
RegressorModel FitRegressor(const RegressorDataset &data, const FitConfig &config = {});

/// Sigmoid score in [0, 1]; UnfittedModel if `model` was never fitted.
double RegressorScore(const RegressorModel &model, const FeatureVector &features);

enum class Verdict { kOnDevice, kOffload };

std::string_view VerdictName(Verdict verdict);

struct OffloadDecision {
  Verdict verdict = Verdict::kOffload;
  double score = 0.0;
};

OffloadDecision PredictOffload(const RegressorModel &model, const ModelSpec &spec, uint64_t node_free_bytes,
                               uint64_t n_batches, uint64_t batch_size, uint64_t kb_per_param = 1);

Json RegressorToJson(const RegressorModel &model);
RegressorModel RegressorFromJson(const Json &json);

}  // namespace resmal

#endif  // RESMAL_RESWARE_H_
