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
#ifndef RESMAL_NNKERNEL_H_
#define RESMAL_NNKERNEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resmal/tensor.h"

namespace resmal {

enum class LayerKind { kInput, kConv, kPool, kFlatten, kDense, kSoftmax };
enum class Activation { kNone, kRelu, kSoftmax };

std::string_view LayerKindName(LayerKind kind);
LayerKind ParseLayerKind(std::string_view name);
std::string_view ActivationName(Activation act);
Activation ParseActivation(std::string_view name);

/// One layer of a sequential CNN. Fields that do not apply to `kind` are 0.
/// `in_channels` (Conv) and `prev_units` (Dense/Softmax) may be left 0 in a
/// hand-written spec; ResolveShapes fills them from the shape chain.
struct LayerSpec {
  LayerKind kind = LayerKind::kInput;
  size_t kernel_w = 0;
  size_t kernel_h = 0;
  size_t filters = 0;
  size_t in_channels = 0;
  size_t units = 0;
  size_t prev_units = 0;
  Activation activation = Activation::kNone;
  size_t pool_window = 0;

  bool trainable() const {
    return kind == LayerKind::kConv || kind == LayerKind::kDense || kind == LayerKind::kSoftmax;
  }

  friend bool operator==(const LayerSpec &, const LayerSpec &) = default;
};

struct ModelSpec {
  Shape input_shape;  // H x W x C, or a single extent for dense-only models
  std::vector<LayerSpec> layers;

  friend bool operator==(const ModelSpec &, const ModelSpec &) = default;
};

/// Validates the layer chain and returns a copy with in_channels/prev_units
/// filled in. Throws ShapeMismatch on any inconsistency.
ModelSpec ResolveShapes(const ModelSpec &spec);

/// Activation shapes along the chain: element 0 is the model input, element
/// i + 1 is the output of layer i.
std::vector<Shape> ActivationShapes(const ModelSpec &spec);

/// The shipped desk-scale architecture: four 3x3 convolutions, two 2x2 max
/// pools, two dense layers and a softmax head over six classes.
ModelSpec DefaultModelSpec();

template <typename T>
struct BasicLayerParams {
  BasicTensor<T> weight;  // Conv: (kh, kw, in, filters); Dense/Softmax: (prev, units)
  BasicTensor<T> bias;

  bool empty() const { return weight.size() == 0; }
  friend bool operator==(const BasicLayerParams &, const BasicLayerParams &) = default;
};

using LayerParams = BasicLayerParams<float>;

struct Model {
  ModelSpec spec;                   // always resolved
  std::vector<LayerParams> params;  // one entry per layer; empty when untrainable

  size_t num_classes() const { return spec.layers.back().units; }
  friend bool operator==(const Model &, const Model &) = default;
};

enum class InitScheme {
  kUniform,     // every weight and bias uniform in [-0.05, 0.05]
  kFanInScaled  // weights uniform in +-sqrt(6 / fan_in), biases zero
};

/// Seeded initialization from SplitMix64; identical seed gives bit-identical
/// weights. kUniform is the default. The default architecture does not train
/// from it (logits start near 1e-6), so training starts from kFanInScaled.
Model BuildModel(const ModelSpec &spec, uint64_t seed, InitScheme scheme = InitScheme::kUniform);

/// Runs a single layer. Conv is valid-padding stride 1, Pool is
/// non-overlapping max. For a Softmax layer the float-rounded probabilities
/// are returned; Forward returns the same values at double precision.
Tensor LayerForward(const LayerSpec &layer, const LayerParams &params, const Tensor &input);

/// Applies layers [first, last) of the model to `input` via LayerForward.
Tensor RunLayers(const Model &model, size_t first, size_t last, Tensor input);

/// Probability head of the final Softmax layer, computed in double.
std::vector<double> OutputProbabilities(const LayerSpec &layer, const LayerParams &params,
                                        const Tensor &input);

/// Full inference: RunLayers over all but the last layer, then
/// OutputProbabilities. Distributed execution reproduces this bit for bit.
std::vector<double> Forward(const Model &model, const Tensor &input);

size_t ArgMax(std::span<const double> values);

struct LabeledSample {
  Tensor input;
  size_t label = 0;
};

struct TrainConfig {
  size_t epochs = 10;
  double learning_rate = 0.005;
  size_t batch_size = 16;
  double momentum = 0.9;  // classical (heavy-ball) momentum; 0 gives plain SGD
  uint64_t seed = 42;
};

struct TrainResult {
  Model model;
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

/// Minibatch SGD on cross-entropy. The sample order of each epoch is a
/// SplitMix64 shuffle seeded from config.seed.
TrainResult TrainModel(Model model, std::span<const LabeledSample> corpus, const TrainConfig &config);

double CrossEntropy(std::span<const double> probabilities, size_t label);

double Accuracy(const Model &model, std::span<const LabeledSample> samples);

/// Max relative error between backprop gradients and central finite
/// differences (step 1e-3) over every parameter, evaluated in double.
double BackwardCheck(const Model &model, const Tensor &input, size_t label);

/// Floating-point operation count of one layer given its input shape.
uint64_t LayerFlops(const LayerSpec &layer, const Shape &input_shape);

std::vector<uint64_t> ModelLayerFlops(const ModelSpec &spec);

}  // namespace resmal

#endif  // RESMAL_NNKERNEL_H_
