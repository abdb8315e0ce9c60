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

#include "fpq/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fpq/quantsim.hpp"
#include "fpq/search.hpp"

namespace fpq {

namespace {

constexpr double kMinMantissa = 0.5;
// Largest m that still rounds half-up to 6.
const double kMaxMantissa = std::nextafter(6.5, 0.0);

/// Rounding decomposition of clip(x, -c, c) on the learned grid.
struct Element {
  double clipped = 0.0;  // x_c
  double scale = 0.0;    // s = 2^p
  double residual = 0.0; // round(x_c / s) - x_c / s
  bool normal = false;
};

class Decomposer {
 public:
  explicit Decomposer(const LearnState& state)
      : clip_(state.clip), mantissa_(state.rounded_mantissa()), bias_(split_bias(state.bias())) {}

  [[nodiscard]] Element operator()(double x) const {
    Element el;
    el.clipped = std::clamp(x, -clip_, clip_);
    // The integer-bias domain mirrors FpQuantizer so residuals vanish exactly on grid points.
    const double y = std::fabs(el.clipped) * bias_.inv_frac_scale;
    const int binade = y == 0.0 ? std::numeric_limits<int>::min() : std::ilogb(y) + bias_.whole;
    el.normal = binade > 1;
    const int q = el.normal ? binade - bias_.whole - mantissa_ : 1 - bias_.whole - mantissa_;
    const double scaled = std::ldexp(y, -q);
    el.residual = el.clipped < 0.0 ? scaled - std::nearbyint(scaled) : std::nearbyint(scaled) - scaled;
    el.scale = std::ldexp(bias_.frac_scale, q);
    return el;
  }

 private:
  double clip_;
  int mantissa_;
  BiasParts bias_;
};

double mantissa_factor(const LearnState& state) {
  const double m = state.mantissa;
  const double pm = std::exp2(-m);
  return std::exp2(7 - state.rounded_mantissa()) + pm / (2.0 - pm);
}

void require_state(const LearnState& state) {
  if (!(state.clip > 0.0) || !std::isfinite(state.clip)) throw FormatError("clip must be positive and finite");
  if (!std::isfinite(state.mantissa)) throw FormatError("mantissa must be finite");
  const int r = state.rounded_mantissa();
  if (r < kSearchMinMantissa || r > kSearchMaxMantissa) throw FormatError("round(m) must be in [1, 6]");
}

}  // namespace

LearnState LearnState::from_format(const FpFormat& format) {
  if (format.mantissa_bits + format.exponent_bits != kEightBitMagnitudeBits) {
    throw FormatError("learning needs an 8-bit layout");
  }
  LearnState s;
  s.clip = max_representable(format);
  s.mantissa = format.mantissa_bits;
  return s;
}

int LearnState::rounded_mantissa() const { return static_cast<int>(std::floor(mantissa + 0.5)); }

double LearnState::bias() const { return bias_from_max(clip, rounded_mantissa(), exponent_bits()); }

FpFormat LearnState::format() const { return format_from_max(clip, rounded_mantissa(), exponent_bits()); }

Eigen::ArrayXd forward(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  require_state(state);
  return quantize_fp(x, state.format());
}

Tensor forward(const Tensor& x, const LearnState& state) { return x.with_data(forward(x.data(), state)); }

Eigen::ArrayXd grad_x(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  const double c = state.clip;
  return (x >= -c && x <= c).cast<double>();
}

Eigen::ArrayXd grad_c(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  require_state(state);
  const Decomposer decompose(state);
  const double c = state.clip;
  const double subnormal = 1.0 / (c * std::numbers::ln2);
  return x.unaryExpr([&](double v) {
    if (v > c) return 1.0;
    if (v < -c) return -1.0;
    const Element el = decompose(v);
    return el.normal ? el.scale / c * el.residual : subnormal;
  });
}

Eigen::ArrayXd grad_m(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  require_state(state);
  const Decomposer decompose(state);
  const double factor = std::numbers::ln2 * mantissa_factor(state);
  return x.unaryExpr([&](double v) {
    const Element el = decompose(v);
    return el.scale * el.residual * factor;
  });
}

double reconstruction_loss(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  return (x - forward(x, state)).square().mean();
}

LossGradient loss_gradient(const Eigen::Ref<const Eigen::ArrayXd>& x, const LearnState& state) {
  const Eigen::ArrayXd err = x - forward(x, state);
  LossGradient g;
  g.loss = err.square().mean();
  g.d_clip = (-2.0 * err * grad_c(x, state)).mean();
  g.d_mantissa = (-2.0 * err * grad_m(x, state)).mean();
  return g;
}

Trajectory sgd_learn(const Tensor& samples, const LearnState& init, double lr_clip, double lr_mantissa,
                     int iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (!(lr_clip >= 0.0) || !(lr_mantissa >= 0.0)) throw std::invalid_argument("learning rates must be non-negative");
  if (samples.size() == 0) throw TensorError("empty sample");
  require_state(init);

  const Eigen::ArrayXd& x = samples.data();
  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(iterations));
  LearnState state = init;
  double initial_loss = 0.0;
  for (int it = 0; it < iterations; ++it) {
    state.iteration = it;
    const LossGradient g = loss_gradient(x, state);
    if (it == 0) initial_loss = g.loss;
    traj.points.push_back({it, state.clip, state.mantissa, g.loss});
    if (!std::isfinite(g.loss) || g.loss > kDivergenceFactor * initial_loss) {
      traj.diverged = true;
      break;
    }
    const double next_clip = state.clip - lr_clip * g.d_clip;
    state.clip = next_clip > 0.0 && std::isfinite(next_clip) ? next_clip : 0.5 * state.clip;
    state.mantissa = std::clamp(state.mantissa - lr_mantissa * g.d_mantissa, kMinMantissa, kMaxMantissa);
  }
  state.iteration = static_cast<int>(traj.points.size());
  traj.final_state = state;
  return traj;
}

LineSearchResult line_search_mse(const Tensor& samples) {
  if (samples.size() == 0) throw TensorError("empty sample");
  const Eigen::ArrayXd& x = samples.data();
  const double absmax = x.abs().maxCoeff();
  if (absmax == 0.0) return {kSearchMinMantissa, min_normal(FpFormat::with_standard_bias(1, 6)), 0.0};

  constexpr int kPoints = 1000;
  std::vector<double> clips(kPoints);
  const double lo = 0.05 * absmax;
  const double step = (1.2 * absmax - lo) / (kPoints - 1);
  for (int i = 0; i < kPoints; ++i) clips[i] = lo + step * i;
  clips.push_back(absmax);
  std::sort(clips.begin(), clips.end());

  LineSearchResult best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (int m = kSearchMinMantissa; m <= kSearchMaxMantissa; ++m) {
    for (double c : clips) {
      const double mse = eval_candidate(x, m, c);
      if (mse < best.mse) best = {m, c, mse};
    }
  }
  return best;
}

}  // namespace fpq
