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
#ifndef RESMAL_MODEL_IO_H_
#define RESMAL_MODEL_IO_H_

#include <filesystem>

#include "resmal/io.h"
#include "resmal/nnkernel.h"

namespace resmal {

// {"input_shape": [H, W, C], "layers": [{"kind": "Conv", "kernel_w": 3, ...}]}
Json ModelSpecToJson(const ModelSpec &spec);
ModelSpec ModelSpecFromJson(const Json &json);
ModelSpec LoadModelSpec(const std::filesystem::path &path);

// {"layers": {"<index>": {"weight_shape": [...], "weight": [...], "bias": [...]}}}
// Values are written as the exact decimal expansion of each float, so a
// load after save reproduces every weight bit for bit.
Json WeightsToJson(const Model &model);
Model ModelFromWeightsJson(const ModelSpec &spec, const Json &json);
Model LoadModel(const std::filesystem::path &spec_path, const std::filesystem::path &weights_path);

}  // namespace resmal

#endif  // RESMAL_MODEL_IO_H_
