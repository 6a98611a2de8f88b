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
#ifndef RESMAL_SPECGEN_H_
#define RESMAL_SPECGEN_H_

#include <cstddef>

#include "resmal/nnkernel.h"
#include "resmal/rng.h"

namespace resmal {

struct RandomSpecOptions {
  size_t max_side = 12;       // input height/width drawn from [3, max_side]
  size_t max_channels = 2;
  size_t max_conv_blocks = 3;  // conv or pool layers before flattening
  size_t max_filters = 4;
  size_t max_dense = 2;        // hidden dense layers before the head
  size_t max_units = 8;
  size_t max_classes = 6;
  bool allow_flat_input = true;  // occasionally emit dense-only models
};

/// A random, well-formed sequential spec (Input ... Softmax). Used to build
/// regressor datasets and property tests; always passes ResolveShapes.
ModelSpec RandomModelSpec(SplitMix64 &rng, const RandomSpecOptions &options = {});

}  // namespace resmal

#endif  // RESMAL_SPECGEN_H_
