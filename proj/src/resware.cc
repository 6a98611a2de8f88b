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
#include "resmal/resware.h"

#include <cmath>
#include <limits>

#include "resmal/rng.h"
#include "resmal/specgen.h"

namespace resmal {

namespace {

uint64_t CheckedMul(uint64_t a, uint64_t b) {
  uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorCode::kOverflow, "memory estimate exceeds 64 bits");
  }
  return out;
}

uint64_t Scale(uint64_t params, const MemoryQuery &q) {
  uint64_t bytes = CheckedMul(q.n_batches, q.batch_size);
  bytes = CheckedMul(bytes, params);
  bytes = CheckedMul(bytes, q.kb_per_param);
  return CheckedMul(bytes, 1024);
}

void CheckQuery(const MemoryQuery &q) {
  if (q.n_batches == 0 || q.batch_size == 0 || q.kb_per_param == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_batches, batch_size and kb_per_param must be >= 1");
  }
}

}  // namespace

uint64_t CountLayerParams(const LayerSpec &layer) {
  switch (layer.kind) {
    case LayerKind::kConv:
      if (layer.in_channels == 0) throw Error(ErrorCode::kUnresolvedShape, "Conv in_channels not resolved");
      return (uint64_t{layer.kernel_w} * layer.kernel_h * layer.in_channels + 1) * layer.filters;
    case LayerKind::kDense:
    case LayerKind::kSoftmax:
      if (layer.prev_units == 0) throw Error(ErrorCode::kUnresolvedShape, "prev_units not resolved");
      return uint64_t{layer.units} * layer.prev_units + layer.units;
    default:
      return 0;
  }
}

ParamProfile CountModelParams(const ModelSpec &spec) {
  const ModelSpec resolved = ResolveShapes(spec);
  ParamProfile profile;
  for (const LayerSpec &layer : resolved.layers) {
    profile.per_layer.push_back(CountLayerParams(layer));
    profile.total += profile.per_layer.back();
  }
  return profile;
}

uint64_t EstimateModelMemory(const MemoryQuery &query) {
  CheckQuery(query);
  return Scale(query.profile.total, query);
}

std::vector<uint64_t> EstimateLayerMemory(const MemoryQuery &query) {
  CheckQuery(query);
  std::vector<uint64_t> bytes;
  bytes.reserve(query.profile.per_layer.size());
  for (const uint64_t p : query.profile.per_layer) bytes.push_back(Scale(p, query));
  return bytes;
}

const std::array<std::string, kNumFeatures> &FeatureNames() {
  static const std::array<std::string, kNumFeatures> names = {
      "total_params",    "total_weights",  "total_biases",       "total_activations",
      "res_model_bytes", "res_node_bytes", "res_node_minus_model"};
  return names;
}

FeatureVector OffloadFeatures(const ModelSpec &spec, uint64_t node_free_bytes, uint64_t n_batches,
                              uint64_t batch_size, uint64_t kb_per_param) {
  const ModelSpec resolved = ResolveShapes(spec);
  uint64_t weights = 0, biases = 0;
  for (const LayerSpec &l : resolved.layers) {
    if (l.kind == LayerKind::kConv) {
      weights += uint64_t{l.kernel_w} * l.kernel_h * l.in_channels * l.filters;
      biases += l.filters;
    } else if (l.trainable()) {
      weights += uint64_t{l.units} * l.prev_units;
      biases += l.units;
    }
  }
  uint64_t activations = 0;
  for (const Shape &s : ActivationShapes(resolved)) activations += ElementCount(s);
  const ParamProfile profile = CountModelParams(resolved);
  const uint64_t model_bytes = EstimateModelMemory({profile, n_batches, batch_size, kb_per_param});
  const double node = static_cast<double>(node_free_bytes);
  const double model = static_cast<double>(model_bytes);
  return {static_cast<double>(profile.total), static_cast<double>(weights), static_cast<double>(biases),
          static_cast<double>(activations),   model,                        node,
          node - model};
}

RegressorDataset BuildRegressorDataset(uint64_t seed, size_t n_samples) {
  if (n_samples < 10) throw Error(ErrorCode::kInvalidArgument, "regressor dataset needs >= 10 samples");
  SplitMix64 rng(seed);
  RegressorDataset data;
  for (size_t i = 0; i < n_samples; ++i) {
    const ModelSpec spec = RandomModelSpec(rng);
    const uint64_t n_batches = static_cast<uint64_t>(rng.Range(1, 4));
    const uint64_t batch_size = static_cast<uint64_t>(rng.Range(1, 32));
    const uint64_t model_bytes = EstimateModelMemory({CountModelParams(spec), n_batches, batch_size, 1});
    uint64_t node_bytes = 0;
    const uint64_t pick = rng.Below(20);
    if (pick == 0) {
      node_bytes = 0;
    } else if (pick <= 4) {
      node_bytes = model_bytes;
    } else if (pick <= 12) {
      node_bytes = static_cast<uint64_t>(static_cast<double>(model_bytes) * rng.Uniform(1.0, 4.0));
    } else {
      node_bytes = static_cast<uint64_t>(static_cast<double>(model_bytes) * rng.Uniform(0.0, 0.95));
    }
    data.features.push_back(OffloadFeatures(spec, node_bytes, n_batches, batch_size));
    data.labels.push_back(FitsOnDevice(model_bytes, node_bytes) ? 1 : 0);
  }
  return data;
}

namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Byte and element counts span several orders of magnitude; without this a
// model of a few KB sits indistinguishably close to the boundary once the
// features are standardized.
double Compress(double v) { return std::copysign(std::log1p(std::fabs(v)), v); }

double Linear(const RegressorModel &m, const FeatureVector &x) {
  double z = m.beta[0];
  for (size_t j = 0; j < kNumFeatures; ++j) z += m.beta[j + 1] * (Compress(x[j]) - m.mean[j]) / m.scale[j];
  return z;
}

}  // namespace

RegressorModel FitRegressor(const RegressorDataset &data, const FitConfig &config) {
  const size_t n = data.features.size();
  if (n == 0 || data.labels.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "dataset features and labels must be non-empty and equal length");
  }
  size_t positives = 0;
  for (const int y : data.labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    positives += static_cast<size_t>(y);
  }
  if (positives == 0 || positives == n) {
    throw Error(ErrorCode::kDegenerateLabels, "dataset contains a single label");
  }

  RegressorModel model;
  model.degenerate = true;
  std::vector<FeatureVector> z(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < kNumFeatures; ++j) z[i][j] = Compress(data.features[i][j]);
  }
  for (size_t j = 0; j < kNumFeatures; ++j) {
    double sum = 0.0;
    for (const FeatureVector &x : z) sum += x[j];
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const FeatureVector &x : z) var += (x[j] - mean) * (x[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    model.mean[j] = mean;
    model.scale[j] = sd > 0.0 ? sd : 1.0;
    if (sd > 0.0) model.degenerate = false;
  }
  model.beta.assign(kNumFeatures + 1, 0.0);
  if (model.degenerate) return model;

  for (FeatureVector &x : z) {
    for (size_t j = 0; j < kNumFeatures; ++j) x[j] = (x[j] - model.mean[j]) / model.scale[j];
  }
  std::vector<double> grad(kNumFeatures + 1);
  for (size_t it = 0; it < config.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double s = model.beta[0];
      for (size_t j = 0; j < kNumFeatures; ++j) s += model.beta[j + 1] * z[i][j];
      const double err = Sigmoid(s) - data.labels[i];
      grad[0] += err;
      for (size_t j = 0; j < kNumFeatures; ++j) grad[j + 1] += err * z[i][j];
    }
    for (size_t j = 0; j <= kNumFeatures; ++j) model.beta[j] -= config.learning_rate * grad[j] / static_cast<double>(n);
  }
  return model;
}

double RegressorScore(const RegressorModel &model, const FeatureVector &features) {
  if (!model.fitted()) throw Error(ErrorCode::kUnfittedModel, "regressor has no coefficients");
  if (model.degenerate) return 0.5;
  return Sigmoid(Linear(model, features));
}

std::string_view VerdictName(Verdict verdict) {
  return verdict == Verdict::kOnDevice ? "OnDevice" : "Offload";
}

OffloadDecision PredictOffload(const RegressorModel &model, const ModelSpec &spec, uint64_t node_free_bytes,
                               uint64_t n_batches, uint64_t batch_size, uint64_t kb_per_param) {
  if (!model.fitted()) throw Error(ErrorCode::kUnfittedModel, "regressor has no coefficients");
  OffloadDecision d;
  d.score = RegressorScore(model, OffloadFeatures(spec, node_free_bytes, n_batches, batch_size, kb_per_param));
  d.verdict = d.score >= 0.5 ? Verdict::kOnDevice : Verdict::kOffload;
  return d;
}

Json RegressorToJson(const RegressorModel &model) {
  return Json{{"feature_names", model.feature_names},
              {"beta", model.beta},
              {"mean", model.mean},
              {"scale", model.scale},
              {"degenerate", model.degenerate}};
}

RegressorModel RegressorFromJson(const Json &json) {
  RegressorModel m;
  const auto names = Require<std::vector<std::string>>(json, "feature_names");
  if (names.size() != kNumFeatures || !std::equal(names.begin(), names.end(), FeatureNames().begin())) {
    throw Error(ErrorCode::kParse, "regressor feature_names do not match the expected order");
  }
  m.beta = Require<std::vector<double>>(json, "beta");
  if (!m.beta.empty() && m.beta.size() != kNumFeatures + 1) {
    throw Error(ErrorCode::kParse, "beta must have " + std::to_string(kNumFeatures + 1) + " entries");
  }
  m.mean = Require<FeatureVector>(json, "mean");
  m.scale = Require<FeatureVector>(json, "scale");
  m.degenerate = Optional<bool>(json, "degenerate", false);
  for (const double v : m.beta) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kParse, "non-finite regressor coefficient");
  }
  for (const double v : m.scale) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::kParse, "regressor scale must be positive");
  }
  return m;
}

}  // namespace resmal
