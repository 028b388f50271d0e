// Copyright 2026 The avcascade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "avcascade/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avcascade/error.hpp"

namespace avc {

std::size_t shape_size(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill),
      cols_(shape_.empty() ? 1 : shape_.back()) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()),
      cols_(shape_.empty() ? 1 : shape_.back()) {
  require(values_.size() == shape_size(shape_), ErrorCode::kShapeMismatch,
          "tensor of shape " + shape_string(shape_) + " given " +
              std::to_string(values_.size()) + " values");
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  require(axis < shape_.size(), ErrorCode::kShapeMismatch,
          "axis " + std::to_string(axis) + " out of range for " + shape_string(shape_));
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (shape_.size() == 1) return 1;
  require(shape_.size() == 2, ErrorCode::kShapeMismatch,
          "expected a matrix, got " + shape_string(shape_));
  return shape_[0];
}

std::size_t Tensor::cols() const {
  require(shape_.size() == 1 || shape_.size() == 2, ErrorCode::kShapeMismatch,
          "expected a matrix, got " + shape_string(shape_));
  return shape_.back();
}

double Tensor::item() const {
  require(values_.size() == 1, ErrorCode::kContractViolation,
          "item() on non-scalar tensor " + shape_string(shape_));
  return values_[0];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) noexcept { std::fill(values_.begin(), values_.end(), value); }

}  // namespace avc
