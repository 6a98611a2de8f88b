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
#include "resmal/specgen.h"

#include <algorithm>
#include <vector>

namespace resmal {

namespace {

size_t Draw(SplitMix64 &rng, size_t lo, size_t hi) {
  return static_cast<size_t>(rng.Range(static_cast<int64_t>(lo), static_cast<int64_t>(hi)));
}

Activation DrawActivation(SplitMix64 &rng) { return rng.Below(2) ? Activation::kRelu : Activation::kNone; }

}  // namespace

ModelSpec RandomModelSpec(SplitMix64 &rng, const RandomSpecOptions &options) {
  ModelSpec spec;
  spec.layers.push_back(LayerSpec{});
  if (options.allow_flat_input && rng.Below(5) == 0) {
    spec.input_shape = {Draw(rng, 1, 4 * options.max_units)};
  } else {
    size_t h = Draw(rng, 3, options.max_side);
    size_t w = Draw(rng, 3, options.max_side);
    size_t c = Draw(rng, 1, options.max_channels);
    spec.input_shape = {h, w, c};
    const size_t blocks = Draw(rng, 0, options.max_conv_blocks);
    for (size_t b = 0; b < blocks; ++b) {
      LayerSpec l;
      std::vector<size_t> windows;
      for (size_t win = 2; win <= 3; ++win) {
        if (h % win == 0 && w % win == 0) windows.push_back(win);
      }
      if (!windows.empty() && rng.Below(3) == 0) {
        l.kind = LayerKind::kPool;
        l.pool_window = windows[rng.Below(windows.size())];
        h /= l.pool_window;
        w /= l.pool_window;
      } else {
        l.kind = LayerKind::kConv;
        l.kernel_h = Draw(rng, 1, std::min<size_t>(3, h));
        l.kernel_w = Draw(rng, 1, std::min<size_t>(3, w));
        l.filters = Draw(rng, 1, options.max_filters);
        l.activation = DrawActivation(rng);
        h = h - l.kernel_h + 1;
        w = w - l.kernel_w + 1;
        c = l.filters;
      }
      spec.layers.push_back(l);
    }
    LayerSpec flatten;
    flatten.kind = LayerKind::kFlatten;
    spec.layers.push_back(flatten);
  }
  const size_t hidden = Draw(rng, 0, options.max_dense);
  for (size_t d = 0; d < hidden; ++d) {
    LayerSpec l;
    l.kind = LayerKind::kDense;
    l.units = Draw(rng, 1, options.max_units);
    l.activation = DrawActivation(rng);
    spec.layers.push_back(l);
  }
  LayerSpec head;
  head.kind = LayerKind::kSoftmax;
  head.units = Draw(rng, 2, options.max_classes);
  head.activation = Activation::kSoftmax;
  spec.layers.push_back(head);
  return ResolveShapes(spec);
}

}  // namespace resmal
