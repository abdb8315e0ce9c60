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

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fpq {

class TensorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat row-major array with a shape and an optional channel axis.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Eigen::ArrayXd data, std::vector<std::size_t> shape,
         std::optional<std::size_t> channel_axis = std::nullopt);

  /// Rank-1 tensor without a channel axis.
  static Tensor vector(Eigen::ArrayXd data);

  [[nodiscard]] const Eigen::ArrayXd& data() const { return data_; }
  [[nodiscard]] Eigen::ArrayXd& data() { return data_; }
  [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
  [[nodiscard]] std::optional<std::size_t> channel_axis() const { return channel_axis_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  [[nodiscard]] bool empty() const { return data_.size() == 0; }

  /// Number of channels along the channel axis; 1 when there is none.
  [[nodiscard]] std::size_t channels() const;

  /// Channel of flat element i.
  [[nodiscard]] std::size_t channel_of(std::size_t i) const;

  /// Elements of each channel, in flat order.
  [[nodiscard]] std::vector<Eigen::ArrayXd> split_channels() const;

  /// Same shape and channel axis, new data.
  [[nodiscard]] Tensor with_data(Eigen::ArrayXd data) const;

 private:
  Eigen::ArrayXd data_;
  std::vector<std::size_t> shape_;
  std::optional<std::size_t> channel_axis_;
  std::size_t inner_ = 1;  // product of dims after the channel axis
};

/// Throws TensorError when any element is NaN or infinite.
void require_finite(const Eigen::Ref<const Eigen::ArrayXd>& x);

}  // namespace fpq
