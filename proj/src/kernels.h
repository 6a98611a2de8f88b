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
// Layer kernels templated on the element type. Float is the production
// path; double is only instantiated by the gradient checker. Every dot
// product accumulates in double regardless of T.
#ifndef RESMAL_SRC_KERNELS_H_
#define RESMAL_SRC_KERNELS_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "resmal/nnkernel.h"

namespace resmal::kernels {

template <typename T>
using Params = BasicLayerParams<T>;

template <typename T>
BasicTensor<T> Conv(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x) {
  if (x.rank() != 3 || x.shape()[2] != layer.in_channels || x.shape()[0] < layer.kernel_h ||
      x.shape()[1] < layer.kernel_w) {
    throw Error(ErrorCode::kShapeMismatch, "conv input " + ShapeToString(x.shape()));
  }
  const size_t kh = layer.kernel_h, kw = layer.kernel_w, cin = layer.in_channels, cout = layer.filters;
  const size_t out_h = x.shape()[0] - kh + 1, out_w = x.shape()[1] - kw + 1;
  BasicTensor<T> y(Shape{out_h, out_w, cout});
  std::vector<double> acc(cout);
  const T *w = p.weight.data().data();
  for (size_t r = 0; r < out_h; ++r) {
    for (size_t c = 0; c < out_w; ++c) {
      for (size_t o = 0; o < cout; ++o) acc[o] = static_cast<double>(p.bias[o]);
      for (size_t i = 0; i < kh; ++i) {
        for (size_t j = 0; j < kw; ++j) {
          for (size_t ci = 0; ci < cin; ++ci) {
            const double xv = static_cast<double>(x.at(r + i, c + j, ci));
            const T *wrow = w + ((i * kw + j) * cin + ci) * cout;
            for (size_t o = 0; o < cout; ++o) acc[o] += xv * static_cast<double>(wrow[o]);
          }
        }
      }
      for (size_t o = 0; o < cout; ++o) {
        T v = static_cast<T>(acc[o]);
        if (layer.activation == Activation::kRelu && v < T{0}) v = T{0};
        y.at(r, c, o) = v;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> Pool(const LayerSpec &layer, const BasicTensor<T> &x) {
  const size_t win = layer.pool_window;
  if (x.rank() != 3 || win == 0 || x.shape()[0] % win != 0 || x.shape()[1] % win != 0) {
    throw Error(ErrorCode::kShapeMismatch, "pool window " + std::to_string(win) + " on input " +
                                               ShapeToString(x.shape()));
  }
  const size_t out_h = x.shape()[0] / win, out_w = x.shape()[1] / win, ch = x.shape()[2];
  BasicTensor<T> y(Shape{out_h, out_w, ch});
  for (size_t r = 0; r < out_h; ++r) {
    for (size_t c = 0; c < out_w; ++c) {
      for (size_t k = 0; k < ch; ++k) {
        T best = x.at(r * win, c * win, k);
        for (size_t i = 0; i < win; ++i) {
          for (size_t j = 0; j < win; ++j) best = std::max(best, x.at(r * win + i, c * win + j, k));
        }
        y.at(r, c, k) = best;
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> Flatten(const BasicTensor<T> &x) {
  return BasicTensor<T>(Shape{x.size()}, std::vector<T>(x.data().begin(), x.data().end()));
}

// Affine part of Dense/Softmax layers, kept in double.
template <typename T>
std::vector<double> Affine(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x) {
  if (x.rank() != 1 || x.size() != layer.prev_units) {
    throw Error(ErrorCode::kShapeMismatch, std::string(LayerKindName(layer.kind)) + " expects " +
                                               std::to_string(layer.prev_units) + " inputs, got " +
                                               ShapeToString(x.shape()));
  }
  const size_t n_in = layer.prev_units, n_out = layer.units;
  std::vector<double> z(n_out);
  for (size_t o = 0; o < n_out; ++o) z[o] = static_cast<double>(p.bias[o]);
  const T *w = p.weight.data().data();
  for (size_t i = 0; i < n_in; ++i) {
    const double xv = static_cast<double>(x[i]);
    const T *wrow = w + i * n_out;
    for (size_t o = 0; o < n_out; ++o) z[o] += xv * static_cast<double>(wrow[o]);
  }
  return z;
}

template <typename T>
BasicTensor<T> Dense(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x) {
  const std::vector<double> z = Affine(layer, p, x);
  BasicTensor<T> y(Shape{layer.units});
  for (size_t o = 0; o < z.size(); ++o) {
    T v = static_cast<T>(z[o]);
    if (layer.activation == Activation::kRelu && v < T{0}) v = T{0};
    y[o] = v;
  }
  return y;
}

inline std::vector<double> Softmax(std::vector<double> z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double &v : z) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double &v : z) v /= total;
  return z;
}

template <typename T>
std::vector<double> SoftmaxProbabilities(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x) {
  return Softmax(Affine(layer, p, x));
}

template <typename T>
BasicTensor<T> Forward(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x) {
  switch (layer.kind) {
    case LayerKind::kInput:
      return x;
    case LayerKind::kConv:
      return Conv(layer, p, x);
    case LayerKind::kPool:
      return Pool(layer, x);
    case LayerKind::kFlatten:
      return Flatten(x);
    case LayerKind::kDense:
      return Dense(layer, p, x);
    case LayerKind::kSoftmax: {
      const std::vector<double> probs = SoftmaxProbabilities(layer, p, x);
      Shape shape{probs.size()};
      return BasicTensor<T>(std::move(shape), std::vector<T>(probs.begin(), probs.end()));
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown layer kind");
}

struct Grads {
  std::vector<double> weight;
  std::vector<double> bias;
};

// Back-propagates `dy` (gradient w.r.t. the layer's post-activation output
// `y`) through one layer, accumulating parameter gradients into `g`.
// For the Softmax layer `dy` must already be the gradient w.r.t. the logits.
template <typename T>
std::vector<double> Backward(const LayerSpec &layer, const Params<T> &p, const BasicTensor<T> &x,
                             const BasicTensor<T> &y, const std::vector<double> &dy, Grads *g) {
  switch (layer.kind) {
    case LayerKind::kInput:
    case LayerKind::kFlatten:
      return dy;
    case LayerKind::kPool: {
      std::vector<double> dx(x.size(), 0.0);
      const size_t win = layer.pool_window, ch = x.shape()[2];
      const size_t out_h = y.shape()[0], out_w = y.shape()[1];
      const size_t in_w = x.shape()[1];
      for (size_t r = 0; r < out_h; ++r) {
        for (size_t c = 0; c < out_w; ++c) {
          for (size_t k = 0; k < ch; ++k) {
            // Route to the first maximal element in scan order.
            size_t best_i = 0, best_j = 0;
            T best = x.at(r * win, c * win, k);
            for (size_t i = 0; i < win; ++i) {
              for (size_t j = 0; j < win; ++j) {
                if (x.at(r * win + i, c * win + j, k) > best) {
                  best = x.at(r * win + i, c * win + j, k);
                  best_i = i;
                  best_j = j;
                }
              }
            }
            dx[((r * win + best_i) * in_w + c * win + best_j) * ch + k] += dy[(r * out_w + c) * ch + k];
          }
        }
      }
      return dx;
    }
    case LayerKind::kConv: {
      const size_t kh = layer.kernel_h, kw = layer.kernel_w, cin = layer.in_channels, cout = layer.filters;
      const size_t out_h = y.shape()[0], out_w = y.shape()[1];
      std::vector<double> dz(dy);
      if (layer.activation == Activation::kRelu) {
        for (size_t i = 0; i < dz.size(); ++i) {
          if (!(y[i] > T{0})) dz[i] = 0.0;
        }
      }
      std::vector<double> dx(x.size(), 0.0);
      const T *w = p.weight.data().data();
      const size_t in_w = x.shape()[1];
      for (size_t r = 0; r < out_h; ++r) {
        for (size_t c = 0; c < out_w; ++c) {
          const double *dzp = &dz[(r * out_w + c) * cout];
          for (size_t o = 0; o < cout; ++o) g->bias[o] += dzp[o];
          for (size_t i = 0; i < kh; ++i) {
            for (size_t j = 0; j < kw; ++j) {
              for (size_t ci = 0; ci < cin; ++ci) {
                const size_t widx = ((i * kw + j) * cin + ci) * cout;
                const double xv = static_cast<double>(x.at(r + i, c + j, ci));
                double back = 0.0;
                for (size_t o = 0; o < cout; ++o) {
                  g->weight[widx + o] += dzp[o] * xv;
                  back += dzp[o] * static_cast<double>(w[widx + o]);
                }
                dx[((r + i) * in_w + (c + j)) * cin + ci] += back;
              }
            }
          }
        }
      }
      return dx;
    }
    case LayerKind::kDense:
    case LayerKind::kSoftmax: {
      std::vector<double> dz(dy);
      if (layer.kind == LayerKind::kDense && layer.activation == Activation::kRelu) {
        for (size_t i = 0; i < dz.size(); ++i) {
          if (!(y[i] > T{0})) dz[i] = 0.0;
        }
      }
      const size_t n_in = layer.prev_units, n_out = layer.units;
      std::vector<double> dx(n_in, 0.0);
      const T *w = p.weight.data().data();
      for (size_t o = 0; o < n_out; ++o) g->bias[o] += dz[o];
      for (size_t i = 0; i < n_in; ++i) {
        const double xv = static_cast<double>(x[i]);
        double back = 0.0;
        for (size_t o = 0; o < n_out; ++o) {
          g->weight[i * n_out + o] += dz[o] * xv;
          back += dz[o] * static_cast<double>(w[i * n_out + o]);
        }
        dx[i] = back;
      }
      return dx;
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown layer kind");
}

// Forward + backward for one sample, accumulating gradients into `grads`
// (one entry per layer, sized to match the parameters). Returns the clamped
// cross-entropy loss.
template <typename T>
double LossAndGradients(const ModelSpec &spec, const std::vector<Params<T>> &params, const BasicTensor<T> &input,
                        size_t label, std::vector<Grads> *grads) {
  const size_t n = spec.layers.size();
  std::vector<BasicTensor<T>> acts;
  acts.reserve(n);
  acts.push_back(input);
  for (size_t l = 0; l + 1 < n; ++l) acts.push_back(Forward(spec.layers[l], params[l], acts.back()));
  const std::vector<double> probs = SoftmaxProbabilities(spec.layers[n - 1], params[n - 1], acts.back());
  const double loss = -std::log(std::max(probs[label], 1e-12));

  std::vector<double> dy(probs);
  dy[label] -= 1.0;
  // The head's "output" tensor is unused by Backward for Softmax layers.
  const BasicTensor<T> unused_head_output(Shape{probs.size()});
  dy = Backward(spec.layers[n - 1], params[n - 1], acts[n - 1], unused_head_output, dy, &(*grads)[n - 1]);
  for (size_t l = n - 1; l-- > 0;) {
    dy = Backward(spec.layers[l], params[l], acts[l], acts[l + 1], dy, &(*grads)[l]);
  }
  return loss;
}

}  // namespace resmal::kernels

#endif  // RESMAL_SRC_KERNELS_H_
