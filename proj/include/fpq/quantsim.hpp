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

#include <variant>
#include <vector>

#include "fpq/formats.hpp"
#include "fpq/tensor.hpp"

namespace fpq {

/// Tie-breaking rule for the per-element rounding step. Only kNearestEven
/// matches the nearest-grid-point oracle; kNearestAway exists for fault injection.
enum class Rounding { kNearestEven, kNearestAway };

/// Simulated quantization to an FP grid using a per-element power-of-two scale.
///
/// For |x| in binade k (k = floor(log2|x| + bias)) the scale is
/// 2^(k - bias - m) when k > 1 and 2^(1 - bias - m) otherwise; the element is
/// rounded on that scale and then clipped to [-c, c]. Precomputes everything
/// that depends only on the format, so one instance can be reused per tensor.
class FpQuantizer {
 public:
  explicit FpQuantizer(const FpFormat& format, Rounding rounding = Rounding::kNearestEven);

  /// Throws TensorError for non-finite input.
  [[nodiscard]] double operator()(double x) const;

  [[nodiscard]] const FpFormat& format() const { return format_; }
  [[nodiscard]] double clip_value() const { return clip_value_; }

 private:
  FpFormat format_;
  Rounding rounding_;
  BiasParts bias_;
  int subnormal_exponent_;  // log2 of the subnormal spacing in the integer-bias domain
  double top_;              // largest value in the integer-bias domain
  double clip_value_;
};

/// Per-tensor or per-channel quantizer settings. For per-channel FP
/// quantization `channel_params` holds one bias per channel (m and e are shared);
/// for INT it holds one scale per channel.
struct QuantizerConfig {
  std::variant<FpFormat, IntFormat> format;
  std::vector<double> channel_params;

  [[nodiscard]] bool per_channel() const { return !channel_params.empty(); }
};

double quantize_fp(double x, const FpFormat& format, Rounding rounding = Rounding::kNearestEven);
Eigen::ArrayXd quantize_fp(const Eigen::Ref<const Eigen::ArrayXd>& x, const FpFormat& format,
                           Rounding rounding = Rounding::kNearestEven);
Tensor quantize_fp(const Tensor& x, const QuantizerConfig& config);

/// Nearest grid value by binary search. Exact ties go to the neighbour with the
/// even magnitude code; values outside the grid clip to its ends.
double quantize_fp_oracle(double x, const QuantGrid& grid);

double quantize_int(double x, const IntFormat& format);
Eigen::ArrayXd quantize_int(const Eigen::Ref<const Eigen::ArrayXd>& x, const IntFormat& format);
Tensor quantize_int(const Tensor& x, const IntFormat& format);

/// Dispatches on the config's format type, honouring per-channel parameters.
Tensor quantize(const Tensor& x, const QuantizerConfig& config);

double empirical_mse(const Eigen::Ref<const Eigen::ArrayXd>& x,
                     const Eigen::Ref<const Eigen::ArrayXd>& quantized);
double empirical_mse(const Tensor& x, const Tensor& quantized);

}  // namespace fpq
