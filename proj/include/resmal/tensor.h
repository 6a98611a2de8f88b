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
#ifndef RESMAL_TENSOR_H_
#define RESMAL_TENSOR_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resmal/error.h"

namespace resmal {

using Shape = std::vector<size_t>;

inline size_t ElementCount(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1}, std::multiplies<>());
}

std::string ShapeToString(const Shape &shape);

/// Dense row-major array. Activations have rank 1..3; convolution kernels
/// (kh, kw, in, filters) are the only rank-4 tensors. The float instantiation is the
/// project-wide Tensor; a double instantiation is used by the gradient
/// checker so finite differences are not swamped by rounding noise.
template <typename T>
class BasicTensor {
 public:
  BasicTensor() = default;

  explicit BasicTensor(Shape shape) : shape_(std::move(shape)) {
    CheckShape();
    data_.assign(ElementCount(shape_), T{0});
  }

  BasicTensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    CheckShape();
    if (data_.size() != ElementCount(shape_)) {
      throw Error(ErrorCode::kShapeMismatch, "tensor data length " + std::to_string(data_.size()) +
                                                 " does not match shape " + ShapeToString(shape_));
    }
  }

  const Shape &shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T> &values() const { return data_; }

  T &operator[](size_t i) { return data_[i]; }
  const T &operator[](size_t i) const { return data_[i]; }

  // (row, col, channel) access for rank-3 HWC tensors.
  T &at(size_t r, size_t c, size_t ch) { return data_[(r * shape_[1] + c) * shape_[2] + ch]; }
  const T &at(size_t r, size_t c, size_t ch) const {
    return data_[(r * shape_[1] + c) * shape_[2] + ch];
  }

  bool AllFinite() const {
    for (const T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const BasicTensor &, const BasicTensor &) = default;

 private:
  void CheckShape() const {
    if (shape_.empty() || shape_.size() > 4) {
      throw Error(ErrorCode::kShapeMismatch, "tensor rank must be 1..4, got " + ShapeToString(shape_));
    }
    for (const size_t extent : shape_) {
      if (extent == 0) throw Error(ErrorCode::kShapeMismatch, "zero extent in " + ShapeToString(shape_));
    }
  }

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

}  // namespace resmal

#endif  // RESMAL_TENSOR_H_
