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

#include <vector>

#include "fpq/formats.hpp"
#include "fpq/tensor.hpp"

namespace fpq {

/// Learnable clipping value c and real-valued mantissa width m of an 8-bit
/// FP quantizer. The grid uses round(m) (half-up) with e = 7 - round(m) and the
/// bias implied by c; gradients use the continuous m.
struct LearnState {
  double clip = 240.0;
  double mantissa = 3.0;
  int iteration = 0;

  static LearnState from_format(const FpFormat& format);

  [[nodiscard]] int rounded_mantissa() const;
  [[nodiscard]] int exponent_bits() const { return 7 - rounded_mantissa(); }
  [[nodiscard]] double bias() const;
  [[nodiscard]] FpFormat format() const;
};

struct TrajectoryPoint {
  int iteration = 0;
  double clip = 0.0;
  double mantissa = 0.0;
  double loss = 0.0;
};

/// One record per iteration, taken before that iteration's update.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  LearnState final_state;
  bool diverged = false;
};

Eigen::ArrayXd forward(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);
Tensor forward(const Tensor& x, const LearnState& state);

/// Straight-through gradient: 1 on [-c, c], 0 elsewhere.
Eigen::ArrayXd grad_x(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);

/// dF/dc. Clipped elements give -1 / +1; in range the normal-binade value is
/// (s / c)(round(x / s) - x / s) and the subnormal value is 1 / (c ln 2).
Eigen::ArrayXd grad_c(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);

/// dF/dm = s ln 2 (round(x_c / s) - x_c / s)(2^(7 - round(m)) + 2^-m / (2 - 2^-m)),
/// with x_c = clip(x, -c, c).
Eigen::ArrayXd grad_m(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);

double reconstruction_loss(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);

struct LossGradient {
  double loss = 0.0;
  double d_clip = 0.0;
  double d_mantissa = 0.0;
};

/// Full-batch loss and its gradient: dL/dθ = mean(-2 (x - F) dF/dθ).
LossGradient loss_gradient(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state);

inline constexpr double kDefaultLearningRateClip = 1e3;
inline constexpr double kDefaultLearningRateMantissa = 1e-2;
inline constexpr double kDivergenceFactor = 1e6;

/// Full-batch SGD on (c, m). A step that would make c non-positive halves c
/// instead; m is kept where round(m) stays in [1, 6]. Stops early, with
/// `diverged` set, once the loss exceeds 1e6 times the initial loss.
Trajectory sgd_learn(const Tensor& samples, const LearnState& init, double lr_clip,
                     double lr_mantissa, int iterations);

struct LineSearchResult {
  int mantissa_bits = 0;
  double clip = 0.0;
  double mse = 0.0;
};

/// Exhaustive search over m in [1, 6] and 1000 clipping values spanning
/// [0.05, 1.2] * absmax (plus absmax itself). Ties go to smaller m, then smaller c.
LineSearchResult line_search_mse(const Tensor& samples);

}  // namespace fpq
