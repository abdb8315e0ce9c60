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
#include <vector>

#include "fpq/quantsim.hpp"
#include "fpq/tensor.hpp"

namespace fpq {

inline constexpr int kSearchMinMantissa = 1;
inline constexpr int kSearchMaxMantissa = 6;
inline constexpr int kEightBitMagnitudeBits = 7;  // mantissa + exponent for 8-bit formats
inline constexpr int kClipCandidates = 111;

/// MSE-optimal 8-bit layout and clipping value(s) for a tensor.
struct FormatSearchResult {
  int mantissa_bits = 1;
  int exponent_bits = 6;
  bool per_channel = false;
  std::vector<double> clip;  // one entry per channel, or a single entry
  std::vector<double> mse;   // reconstruction MSE matching `clip`
  double total_mse = 0.0;    // MSE over the whole tensor with the chosen settings
  std::vector<std::size_t> degenerate_channels;

  [[nodiscard]] bool degenerate() const { return !degenerate_channels.empty(); }
  /// Quantizer settings equivalent to this result.
  [[nodiscard]] QuantizerConfig config() const;
};

/// 111 evenly spaced clipping values from 0.1 to 1.2 times `absmax`, both ends included.
std::vector<double> clip_candidates(double absmax);

/// Reconstruction MSE of x under the 8-bit format with m mantissa bits and max value c.
double eval_candidate(const Eigen::Ref<const Eigen::ArrayXd>& x, int mantissa_bits, double clip);
double eval_candidate(const Tensor& x, int mantissa_bits, double clip);

/// Grid search over m in [1, 6] and the clipping candidates.
///
/// Per-channel search finds the best clipping value of every channel for each
/// m, picks m by majority vote over channels (ties: lowest cumulative MSE, then
/// smaller m), and keeps each channel's best clipping value for that m.
/// All-zero channels are degenerate: they do not vote and get the smallest
/// normal value of the standard-bias format as their clipping value.
FormatSearchResult grid_search_format(const Tensor& x, bool per_channel);

}  // namespace fpq
