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
#include "resmal/model_io.h"

#include <set>
#include <string>

namespace resmal {

namespace {

const std::set<std::string> kLayerKeys = {"kind",        "kernel_w", "kernel_h",   "filters",    "in_channels",
                                          "units",       "prev_units", "activation", "pool_window"};

Json TensorValues(const Tensor &t) {
  Json values = Json::array();
  for (const float v : t.data()) values.push_back(static_cast<double>(v));
  return values;
}

std::vector<float> FloatsFrom(const Json &values, const std::string &where) {
  if (!values.is_array()) throw Error(ErrorCode::kParse, where + " must be an array");
  std::vector<float> out;
  out.reserve(values.size());
  for (const Json &v : values) {
    if (!v.is_number()) throw Error(ErrorCode::kParse, where + " holds a non-number");
    out.push_back(static_cast<float>(v.get<double>()));
  }
  return out;
}

}  // namespace

Json ModelSpecToJson(const ModelSpec &spec) {
  Json layers = Json::array();
  for (const LayerSpec &l : spec.layers) {
    Json j;
    j["kind"] = std::string(LayerKindName(l.kind));
    if (l.kernel_w) j["kernel_w"] = l.kernel_w;
    if (l.kernel_h) j["kernel_h"] = l.kernel_h;
    if (l.filters) j["filters"] = l.filters;
    if (l.in_channels) j["in_channels"] = l.in_channels;
    if (l.units) j["units"] = l.units;
    if (l.prev_units) j["prev_units"] = l.prev_units;
    if (l.pool_window) j["pool_window"] = l.pool_window;
    if (l.activation != Activation::kNone) j["activation"] = std::string(ActivationName(l.activation));
    layers.push_back(std::move(j));
  }
  return Json{{"input_shape", spec.input_shape}, {"layers", std::move(layers)}};
}

ModelSpec ModelSpecFromJson(const Json &json) {
  ModelSpec spec;
  spec.input_shape = Require<Shape>(json, "input_shape");
  const Json layers = Require<Json>(json, "layers");
  if (!layers.is_array()) throw Error(ErrorCode::kParse, "'layers' must be an array");
  for (const Json &j : layers) {
    if (!j.is_object()) throw Error(ErrorCode::kParse, "layer entries must be objects");
    for (const auto &item : j.items()) {
      if (!kLayerKeys.contains(item.key())) throw Error(ErrorCode::kParse, "unknown layer field '" + item.key() + "'");
    }
    LayerSpec l;
    l.kind = ParseLayerKind(Require<std::string>(j, "kind"));
    l.kernel_w = Optional<size_t>(j, "kernel_w", 0);
    l.kernel_h = Optional<size_t>(j, "kernel_h", 0);
    l.filters = Optional<size_t>(j, "filters", 0);
    l.in_channels = Optional<size_t>(j, "in_channels", 0);
    l.units = Optional<size_t>(j, "units", 0);
    l.prev_units = Optional<size_t>(j, "prev_units", 0);
    l.pool_window = Optional<size_t>(j, "pool_window", 0);
    l.activation = ParseActivation(Optional<std::string>(j, "activation", "none"));
    spec.layers.push_back(l);
  }
  return spec;
}

ModelSpec LoadModelSpec(const std::filesystem::path &path) { return ModelSpecFromJson(ReadJsonFile(path)); }

Json WeightsToJson(const Model &model) {
  Json layers = Json::object();
  for (size_t i = 0; i < model.params.size(); ++i) {
    const LayerParams &p = model.params[i];
    if (p.empty()) continue;
    layers[std::to_string(i)] = Json{
        {"weight_shape", p.weight.shape()}, {"weight", TensorValues(p.weight)}, {"bias", TensorValues(p.bias)}};
  }
  return Json{{"layers", std::move(layers)}};
}

Model ModelFromWeightsJson(const ModelSpec &spec, const Json &json) {
  Model model = BuildModel(spec, 0);
  const Json layers = Require<Json>(json, "layers");
  if (!layers.is_object()) throw Error(ErrorCode::kParse, "'layers' must be an object keyed by layer index");
  size_t seen = 0;
  for (size_t i = 0; i < model.params.size(); ++i) {
    LayerParams &p = model.params[i];
    if (p.empty()) continue;
    const std::string key = std::to_string(i);
    if (!layers.contains(key)) throw Error(ErrorCode::kShapeMismatch, "weights missing for layer " + key);
    const Json &entry = layers.at(key);
    const Shape shape = Require<Shape>(entry, "weight_shape");
    if (shape != p.weight.shape()) {
      throw Error(ErrorCode::kShapeMismatch, "layer " + key + " weight shape " + ShapeToString(shape) +
                                                 ", spec needs " + ShapeToString(p.weight.shape()));
    }
    p.weight = Tensor(shape, FloatsFrom(Require<Json>(entry, "weight"), "layer " + key + " weight"));
    p.bias = Tensor(p.bias.shape(), FloatsFrom(Require<Json>(entry, "bias"), "layer " + key + " bias"));
    ++seen;
  }
  if (seen != layers.size()) throw Error(ErrorCode::kShapeMismatch, "weights file has entries for untrainable layers");
  return model;
}

Model LoadModel(const std::filesystem::path &spec_path, const std::filesystem::path &weights_path) {
  return ModelFromWeightsJson(LoadModelSpec(spec_path), ReadJsonFile(weights_path));
}

}  // namespace resmal
