// Copyright 2026 The fpq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpq/tensor.hpp"

#include <functional>
#include <numeric>
#include <string>

namespace fpq {

Tensor::Tensor(Eigen::ArrayXd data, std::vector<std::size_t> shape,
               std::optional<std::size_t> channel_axis)
    : data_(std::move(data)), shape_(std::move(shape)), channel_axis_(channel_axis) {
  for (std::size_t d : shape_) {
    if (d == 0) throw TensorError("tensor dimensions must be positive");
  }
  require_finite(data_);
  const std::size_t count =
      std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
  if (shape_.empty() || count != size()) {
    throw TensorError("shape product " + std::to_string(count) + " does not match " +
                      std::to_string(size()) + " elements");
  }
  if (channel_axis_) {
    if (*channel_axis_ >= shape_.size()) {
      throw TensorError("channel axis " + std::to_string(*channel_axis_) + " out of range for rank " +
                        std::to_string(shape_.size()));
    }
    inner_ = std::accumulate(shape_.begin() + static_cast<std::ptrdiff_t>(*channel_axis_) + 1,
                             shape_.end(), std::size_t{1}, std::multiplies<>());
  }
}

Tensor Tensor::vector(Eigen::ArrayXd data) {
  const auto n = static_cast<std::size_t>(data.size());
  if (n == 0) throw TensorError("tensor must not be empty");
  return Tensor(std::move(data), {n});
}

std::size_t Tensor::channels() const { return channel_axis_ ? shape_[*channel_axis_] : 1; }

std::size_t Tensor::channel_of(std::size_t i) const {
  if (!channel_axis_) return 0;
  return (i / inner_) % shape_[*channel_axis_];
}

std::vector<Eigen::ArrayXd> Tensor::split_channels() const {
  const std::size_t c = channels();
  std::vector<std::size_t> counts(c, 0);
  for (std::size_t i = 0; i < size(); ++i) ++counts[channel_of(i)];
  std::vector<Eigen::ArrayXd> out(c);
  for (std::size_t k = 0; k < c; ++k) out[k].resize(static_cast<Eigen::Index>(counts[k]));
  std::vector<Eigen::Index> fill(c, 0);
  for (std::size_t i = 0; i < size(); ++i) {
    const std::size_t k = channel_of(i);
    out[k][fill[k]++] = data_[static_cast<Eigen::Index>(i)];
  }
  return out;
}

Tensor Tensor::with_data(Eigen::ArrayXd data) const {
  return Tensor(std::move(data), shape_, channel_axis_);
}

void require_finite(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  if (!x.allFinite()) throw TensorError("tensor contains non-finite values");
}

}  // namespace fpq
