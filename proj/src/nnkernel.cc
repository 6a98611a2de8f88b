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
#include "resmal/nnkernel.h"

#include <algorithm>
#include <cmath>

#include "kernels.h"
#include "resmal/rng.h"

namespace resmal {

std::string_view LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kInput: return "Input";
    case LayerKind::kConv: return "Conv";
    case LayerKind::kPool: return "Pool";
    case LayerKind::kFlatten: return "Flatten";
    case LayerKind::kDense: return "Dense";
    case LayerKind::kSoftmax: return "Softmax";
  }
  return "?";
}

LayerKind ParseLayerKind(std::string_view name) {
  for (const LayerKind k : {LayerKind::kInput, LayerKind::kConv, LayerKind::kPool, LayerKind::kFlatten,
                            LayerKind::kDense, LayerKind::kSoftmax}) {
    if (LayerKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kUnsupported, "unknown layer kind '" + std::string(name) + "'");
}

std::string_view ActivationName(Activation act) {
  switch (act) {
    case Activation::kNone: return "none";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

Activation ParseActivation(std::string_view name) {
  for (const Activation a : {Activation::kNone, Activation::kRelu, Activation::kSoftmax}) {
    if (ActivationName(a) == name) return a;
  }
  throw Error(ErrorCode::kUnsupported, "unknown activation '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void Mismatch(size_t index, const LayerSpec &layer, const std::string &what) {
  throw Error(ErrorCode::kShapeMismatch,
              "layer " + std::to_string(index) + " (" + std::string(LayerKindName(layer.kind)) + "): " + what);
}

void RequireAbsent(size_t index, const LayerSpec &layer, bool conv_fields, bool dense_fields, bool pool_field) {
  const bool has_conv = layer.kernel_w || layer.kernel_h || layer.filters || layer.in_channels;
  const bool has_dense = layer.units || layer.prev_units;
  if ((!conv_fields && has_conv) || (!dense_fields && has_dense) || (!pool_field && layer.pool_window)) {
    Mismatch(index, layer, "field not applicable to this layer kind");
  }
}

// Shape-checks layer `index` against its input shape, fills inferred fields
// and returns the output shape.
Shape ResolveLayer(size_t index, LayerSpec &layer, const Shape &in) {
  switch (layer.kind) {
    case LayerKind::kInput:
      RequireAbsent(index, layer, false, false, false);
      if (index != 0) Mismatch(index, layer, "Input must be the first layer");
      if (layer.activation != Activation::kNone) Mismatch(index, layer, "Input takes no activation");
      return in;
    case LayerKind::kConv: {
      RequireAbsent(index, layer, true, false, false);
      if (layer.kernel_w == 0 || layer.kernel_h == 0 || layer.filters == 0) {
        Mismatch(index, layer, "kernel_w, kernel_h and filters must be >= 1");
      }
      if (in.size() != 3) Mismatch(index, layer, "needs an HxWxC input, got " + ShapeToString(in));
      if (layer.in_channels != 0 && layer.in_channels != in[2]) {
        Mismatch(index, layer, "in_channels " + std::to_string(layer.in_channels) + " but input has " +
                                   std::to_string(in[2]));
      }
      if (in[0] < layer.kernel_h || in[1] < layer.kernel_w) {
        Mismatch(index, layer, "kernel larger than input " + ShapeToString(in));
      }
      if (layer.activation == Activation::kSoftmax) Mismatch(index, layer, "softmax activation on Conv");
      layer.in_channels = in[2];
      return {in[0] - layer.kernel_h + 1, in[1] - layer.kernel_w + 1, layer.filters};
    }
    case LayerKind::kPool:
      RequireAbsent(index, layer, false, false, true);
      if (layer.pool_window == 0) Mismatch(index, layer, "pool_window must be >= 1");
      if (in.size() != 3) Mismatch(index, layer, "needs an HxWxC input, got " + ShapeToString(in));
      if (in[0] % layer.pool_window != 0 || in[1] % layer.pool_window != 0) {
        Mismatch(index, layer, "window " + std::to_string(layer.pool_window) + " does not divide " +
                                   ShapeToString(in));
      }
      if (layer.activation != Activation::kNone) Mismatch(index, layer, "Pool takes no activation");
      return {in[0] / layer.pool_window, in[1] / layer.pool_window, in[2]};
    case LayerKind::kFlatten:
      RequireAbsent(index, layer, false, false, false);
      if (layer.activation != Activation::kNone) Mismatch(index, layer, "Flatten takes no activation");
      return {ElementCount(in)};
    case LayerKind::kDense:
    case LayerKind::kSoftmax: {
      RequireAbsent(index, layer, false, true, false);
      if (layer.units == 0) Mismatch(index, layer, "units must be >= 1");
      if (in.size() != 1) Mismatch(index, layer, "needs a flat input, got " + ShapeToString(in));
      if (layer.prev_units != 0 && layer.prev_units != in[0]) {
        Mismatch(index, layer, "prev_units " + std::to_string(layer.prev_units) + " but input has " +
                                   std::to_string(in[0]));
      }
      if (layer.kind == LayerKind::kSoftmax) {
        if (layer.activation == Activation::kRelu) Mismatch(index, layer, "Softmax layer with relu");
        layer.activation = Activation::kSoftmax;
      } else if (layer.activation == Activation::kSoftmax) {
        Mismatch(index, layer, "softmax activation belongs on the Softmax layer");
      }
      layer.prev_units = in[0];
      return {layer.units};
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown layer kind");
}

struct Resolution {
  ModelSpec spec;
  std::vector<Shape> shapes;
};

Resolution Resolve(const ModelSpec &input) {
  Resolution res{input, {}};
  const Shape &in = res.spec.input_shape;
  if ((in.size() != 1 && in.size() != 3) || std::find(in.begin(), in.end(), 0) != in.end()) {
    throw Error(ErrorCode::kShapeMismatch, "input_shape must be HxWxC or a single extent, got " + ShapeToString(in));
  }
  if (res.spec.layers.empty()) throw Error(ErrorCode::kShapeMismatch, "model has no layers");
  if (res.spec.layers.front().kind != LayerKind::kInput) {
    throw Error(ErrorCode::kShapeMismatch, "first layer must be Input");
  }
  if (res.spec.layers.back().kind != LayerKind::kSoftmax) {
    throw Error(ErrorCode::kShapeMismatch, "last layer must be Softmax");
  }
  res.shapes.push_back(in);
  for (size_t i = 0; i < res.spec.layers.size(); ++i) {
    res.shapes.push_back(ResolveLayer(i, res.spec.layers[i], res.shapes.back()));
  }
  return res;
}

}  // namespace

ModelSpec ResolveShapes(const ModelSpec &spec) { return Resolve(spec).spec; }

std::vector<Shape> ActivationShapes(const ModelSpec &spec) { return Resolve(spec).shapes; }

ModelSpec DefaultModelSpec() {
  auto conv = [](size_t filters) {
    LayerSpec l;
    l.kind = LayerKind::kConv;
    l.kernel_w = 3;
    l.kernel_h = 3;
    l.filters = filters;
    l.activation = Activation::kRelu;
    return l;
  };
  auto pool = [] {
    LayerSpec l;
    l.kind = LayerKind::kPool;
    l.pool_window = 2;
    return l;
  };
  auto dense = [](size_t units, Activation act) {
    LayerSpec l;
    l.kind = LayerKind::kDense;
    l.units = units;
    l.activation = act;
    return l;
  };
  LayerSpec input;
  LayerSpec flatten;
  flatten.kind = LayerKind::kFlatten;
  LayerSpec head;
  head.kind = LayerKind::kSoftmax;
  head.units = 6;
  head.activation = Activation::kSoftmax;

  ModelSpec spec;
  spec.input_shape = {32, 32, 1};
  // 32x32x1 -> 30x30x8 -> 28x28x8 -> 14x14x8 -> 12x12x16 -> 6x6x16 -> 4x4x16 -> 256 -> 64 -> 6 -> 6
  spec.layers = {input,   conv(8), conv(8), pool(), conv(16), pool(), conv(16),
                 flatten, dense(64, Activation::kRelu), dense(6, Activation::kNone), head};
  return ResolveShapes(spec);
}

Model BuildModel(const ModelSpec &spec, uint64_t seed, InitScheme scheme) {
  Model model;
  model.spec = ResolveShapes(spec);
  SplitMix64 rng(seed);
  auto draw = [&rng](Shape shape, double limit) {
    Tensor t(std::move(shape));
    for (float &v : t.data()) v = static_cast<float>(rng.Uniform(-limit, limit));
    return t;
  };
  model.params.resize(model.spec.layers.size());
  for (size_t i = 0; i < model.spec.layers.size(); ++i) {
    const LayerSpec &l = model.spec.layers[i];
    if (!l.trainable()) continue;
    Shape weight_shape, bias_shape;
    size_t fan_in = 0;
    if (l.kind == LayerKind::kConv) {
      weight_shape = {l.kernel_h, l.kernel_w, l.in_channels, l.filters};
      bias_shape = {l.filters};
      fan_in = l.kernel_h * l.kernel_w * l.in_channels;
    } else {
      weight_shape = {l.prev_units, l.units};
      bias_shape = {l.units};
      fan_in = l.prev_units;
    }
    if (scheme == InitScheme::kUniform) {
      model.params[i].weight = draw(weight_shape, 0.05);
      model.params[i].bias = draw(bias_shape, 0.05);
    } else {
      model.params[i].weight = draw(weight_shape, std::sqrt(6.0 / static_cast<double>(fan_in)));
      model.params[i].bias = Tensor(bias_shape);
    }
  }
  return model;
}

Tensor LayerForward(const LayerSpec &layer, const LayerParams &params, const Tensor &input) {
  return kernels::Forward(layer, params, input);
}

Tensor RunLayers(const Model &model, size_t first, size_t last, Tensor input) {
  if (first > last || last > model.spec.layers.size()) {
    throw Error(ErrorCode::kInvalidArgument, "layer range out of bounds");
  }
  if (first == 0 && input.shape() != model.spec.input_shape) {
    throw Error(ErrorCode::kShapeMismatch, "model expects input " + ShapeToString(model.spec.input_shape) +
                                               ", got " + ShapeToString(input.shape()));
  }
  for (size_t i = first; i < last; ++i) input = LayerForward(model.spec.layers[i], model.params[i], input);
  return input;
}

std::vector<double> OutputProbabilities(const LayerSpec &layer, const LayerParams &params, const Tensor &input) {
  if (layer.kind != LayerKind::kSoftmax) {
    throw Error(ErrorCode::kShapeMismatch, "probability head must be a Softmax layer");
  }
  return kernels::SoftmaxProbabilities(layer, params, input);
}

std::vector<double> Forward(const Model &model, const Tensor &input) {
  const size_t n = model.spec.layers.size();
  const Tensor features = RunLayers(model, 0, n - 1, input);
  return OutputProbabilities(model.spec.layers[n - 1], model.params[n - 1], features);
}

size_t ArgMax(std::span<const double> values) {
  return static_cast<size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double CrossEntropy(std::span<const double> probabilities, size_t label) {
  return -std::log(std::max(probabilities[label], 1e-12));
}

double Accuracy(const Model &model, std::span<const LabeledSample> samples) {
  if (samples.empty()) return 0.0;
  size_t correct = 0;
  for (const LabeledSample &s : samples) {
    if (ArgMax(Forward(model, s.input)) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

uint64_t LayerFlops(const LayerSpec &layer, const Shape &in) {
  switch (layer.kind) {
    case LayerKind::kInput:
    case LayerKind::kFlatten:
      return 0;
    case LayerKind::kConv: {
      const uint64_t out_h = in[0] - layer.kernel_h + 1, out_w = in[1] - layer.kernel_w + 1;
      return 2ULL * layer.kernel_w * layer.kernel_h * in[2] * layer.filters * out_h * out_w;
    }
    case LayerKind::kPool: {
      const uint64_t out_h = in[0] / layer.pool_window, out_w = in[1] / layer.pool_window;
      return out_h * out_w * in[2] * layer.pool_window * layer.pool_window;
    }
    case LayerKind::kDense:
    case LayerKind::kSoftmax:
      return 2ULL * ElementCount(in) * layer.units;
  }
  return 0;
}

std::vector<uint64_t> ModelLayerFlops(const ModelSpec &spec) {
  const Resolution res = Resolve(spec);
  std::vector<uint64_t> flops;
  for (size_t i = 0; i < res.spec.layers.size(); ++i) flops.push_back(LayerFlops(res.spec.layers[i], res.shapes[i]));
  return flops;
}

}  // namespace resmal
