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
#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernels.h"
#include "resmal/nnkernel.h"
#include "resmal/rng.h"

namespace resmal {

namespace {

// Gradients smaller than this are compared in absolute terms.
constexpr double kGradientFloor = 1e-8;

template <typename T>
std::vector<kernels::Grads> ZeroGrads(const std::vector<BasicLayerParams<T>> &params) {
  std::vector<kernels::Grads> grads(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    grads[i].weight.assign(params[i].weight.size(), 0.0);
    grads[i].bias.assign(params[i].bias.size(), 0.0);
  }
  return grads;
}

BasicTensor<double> Widen(const Tensor &t) {
  if (t.size() == 0) return {};
  return BasicTensor<double>(t.shape(), std::vector<double>(t.data().begin(), t.data().end()));
}

struct Probe {
  double loss = 0.0;
  // Relu on/off bits and max-pool winners; a change between two probes means
  // a non-differentiable point lies between them.
  std::vector<uint32_t> pattern;
};

Probe ProbeLoss(const ModelSpec &spec, const std::vector<BasicLayerParams<double>> &params,
                const BasicTensor<double> &input, size_t label) {
  Probe probe;
  BasicTensor<double> x = input;
  const size_t n = spec.layers.size();
  for (size_t l = 0; l + 1 < n; ++l) {
    const LayerSpec &layer = spec.layers[l];
    BasicTensor<double> y = kernels::Forward(layer, params[l], x);
    if (layer.activation == Activation::kRelu) {
      for (const double v : y.data()) probe.pattern.push_back(v > 0.0 ? 1u : 0u);
    } else if (layer.kind == LayerKind::kPool) {
      const size_t win = layer.pool_window;
      for (size_t r = 0; r < y.shape()[0]; ++r) {
        for (size_t c = 0; c < y.shape()[1]; ++c) {
          for (size_t k = 0; k < y.shape()[2]; ++k) {
            uint32_t winner = 0;
            double best = x.at(r * win, c * win, k);
            for (size_t i = 0; i < win * win; ++i) {
              const double v = x.at(r * win + i / win, c * win + i % win, k);
              if (v > best) {
                best = v;
                winner = static_cast<uint32_t>(i);
              }
            }
            probe.pattern.push_back(winner);
          }
        }
      }
    }
    x = std::move(y);
  }
  probe.loss = CrossEntropy(kernels::SoftmaxProbabilities(spec.layers[n - 1], params[n - 1], x), label);
  return probe;
}

}  // namespace

TrainResult TrainModel(Model model, std::span<const LabeledSample> corpus, const TrainConfig &config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "training corpus is empty");
  if (config.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  const size_t classes = model.num_classes();
  for (const LabeledSample &s : corpus) {
    if (s.label >= classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(s.label) + " outside [0, " + std::to_string(classes) + ")");
    }
    if (s.input.shape() != model.spec.input_shape) {
      throw Error(ErrorCode::kShapeMismatch, "training sample shape " + ShapeToString(s.input.shape()));
    }
  }

  TrainResult result;
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 rng(config.seed);
  std::vector<double> sample_loss(corpus.size());
  std::vector<kernels::Grads> velocity = ZeroGrads(model.params);

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<kernels::Grads> grads = ZeroGrads(model.params);
      for (size_t k = start; k < end; ++k) {
        const LabeledSample &s = corpus[order[k]];
        sample_loss[order[k]] = kernels::LossAndGradients(model.spec, model.params, s.input, s.label, &grads);
      }
      const double scale = config.learning_rate / static_cast<double>(end - start);
      auto step = [&](std::span<float> values, std::vector<double> &vel, const std::vector<double> &grad) {
        for (size_t i = 0; i < values.size(); ++i) {
          vel[i] = config.momentum * vel[i] - scale * grad[i];
          values[i] = static_cast<float>(values[i] + vel[i]);
        }
      };
      for (size_t l = 0; l < model.params.size(); ++l) {
        step(model.params[l].weight.data(), velocity[l].weight, grads[l].weight);
        step(model.params[l].bias.data(), velocity[l].bias, grads[l].bias);
      }
    }
    // Summed in sample-index order so the value does not depend on the shuffle.
    const double total = std::accumulate(sample_loss.begin(), sample_loss.end(), 0.0);
    result.epoch_loss.push_back(total / static_cast<double>(corpus.size()));
  }
  result.model = std::move(model);
  return result;
}

double BackwardCheck(const Model &model, const Tensor &input, size_t label) {
  constexpr double kStep = 1e-3;
  constexpr int kRefinements = 3;
  const ModelSpec &spec = model.spec;
  std::vector<BasicLayerParams<double>> params(model.params.size());
  for (size_t l = 0; l < params.size(); ++l) {
    params[l].weight = Widen(model.params[l].weight);
    params[l].bias = Widen(model.params[l].bias);
  }
  const BasicTensor<double> x = Widen(input);

  std::vector<kernels::Grads> grads = ZeroGrads(params);
  kernels::LossAndGradients(spec, params, x, label, &grads);
  const std::vector<uint32_t> base_pattern = ProbeLoss(spec, params, x, label).pattern;

  double worst = 0.0;
  auto compare = [&](double analytic, double &slot) {
    const double saved = slot;
    double numeric = 0.0;
    // Central difference at step 1e-3. When the probes straddle a relu or
    // pool kink the step is shrunk by 10x, at most kRefinements times.
    double step = kStep;
    for (int attempt = 0; attempt <= kRefinements; ++attempt, step *= 0.1) {
      slot = saved + step;
      const Probe up = ProbeLoss(spec, params, x, label);
      slot = saved - step;
      const Probe down = ProbeLoss(spec, params, x, label);
      slot = saved;
      numeric = (up.loss - down.loss) / (2.0 * step);
      if (up.pattern == base_pattern && down.pattern == base_pattern) break;
    }
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale == 0.0) return;  // 0/0 counts as exact agreement
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(scale, kGradientFloor));
  };
  for (size_t l = 0; l < params.size(); ++l) {
    for (size_t i = 0; i < params[l].weight.size(); ++i) compare(grads[l].weight[i], params[l].weight[i]);
    for (size_t i = 0; i < params[l].bias.size(); ++i) compare(grads[l].bias[i], params[l].bias[i]);
  }
  return worst;
}

}  // namespace resmal
