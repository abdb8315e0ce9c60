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

#include "fpq/search.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace fpq {

namespace {

constexpr int kMantissaChoices = kSearchMaxMantissa - kSearchMinMantissa + 1;

struct ChannelSweep {
  bool degenerate = false;
  std::array<double, kMantissaChoices> best_clip{};
  std::array<double, kMantissaChoices> best_mse{};
};

double degenerate_clip(int mantissa_bits) {
  return min_normal(FpFormat::with_standard_bias(mantissa_bits, kEightBitMagnitudeBits - mantissa_bits));
}

ChannelSweep sweep_channel(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  ChannelSweep sweep;
  const double absmax = x.size() == 0 ? 0.0 : x.abs().maxCoeff();
  if (absmax == 0.0) {
    sweep.degenerate = true;
    return sweep;
  }
  const std::vector<double> clips = clip_candidates(absmax);
  for (int i = 0; i < kMantissaChoices; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (double c : clips) {
      const double mse = eval_candidate(x, kSearchMinMantissa + i, c);
      if (mse < best) {
        best = mse;
        sweep.best_clip[i] = c;
      }
    }
    sweep.best_mse[i] = best;
  }
  return sweep;
}

}  // namespace

QuantizerConfig FormatSearchResult::config() const {
  const int e = exponent_bits;
  QuantizerConfig cfg{format_from_max(clip.front(), mantissa_bits, e), {}};
  if (per_channel) {
    for (double c : clip) cfg.channel_params.push_back(bias_from_max(c, mantissa_bits, e));
  }
  return cfg;
}

std::vector<double> clip_candidates(double absmax) {
  std::vector<double> clips(kClipCandidates);
  // c_k = absmax * (10 + k) / 100 lands exactly on absmax at k = 90.
  for (int k = 0; k < kClipCandidates; ++k) clips[k] = absmax * (10.0 + k) / 100.0;
  return clips;
}

double eval_candidate(const Eigen::Ref<const Eigen::ArrayXd>& x, int mantissa_bits, double clip) {
  if (mantissa_bits < kSearchMinMantissa || mantissa_bits > kSearchMaxMantissa) {
    throw FormatError("candidate mantissa bits must be in [1, 6]");
  }
  const FpQuantizer q(format_from_max(clip, mantissa_bits, kEightBitMagnitudeBits - mantissa_bits));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - q(x[i]);
    sum += d * d;
  }
  return x.size() == 0 ? 0.0 : sum / static_cast<double>(x.size());
}

double eval_candidate(const Tensor& x, int mantissa_bits, double clip) {
  return eval_candidate(x.data(), mantissa_bits, clip);
}

FormatSearchResult grid_search_format(const Tensor& x, bool per_channel) {
  if (per_channel && !x.channel_axis()) throw TensorError("per-channel search needs a channel axis");
  FormatSearchResult result;
  result.per_channel = per_channel;

  if (!per_channel) {
    const double absmax = x.data().abs().maxCoeff();
    if (absmax == 0.0) {
      result.mantissa_bits = kSearchMinMantissa;
      result.exponent_bits = kEightBitMagnitudeBits - kSearchMinMantissa;
      result.clip = {degenerate_clip(kSearchMinMantissa)};
      result.mse = {0.0};
      result.degenerate_channels = {0};
      return result;
    }
    // Exhaustive scan in (m, c) order with strict improvement keeps the
    // smaller m, then the smaller c, on ties.
    double best = std::numeric_limits<double>::infinity();
    const std::vector<double> clips = clip_candidates(absmax);
    for (int m = kSearchMinMantissa; m <= kSearchMaxMantissa; ++m) {
      for (double c : clips) {
        const double mse = eval_candidate(x.data(), m, c);
        if (mse < best) {
          best = mse;
          result.mantissa_bits = m;
          result.clip = {c};
        }
      }
    }
    result.exponent_bits = kEightBitMagnitudeBits - result.mantissa_bits;
    result.mse = {best};
    result.total_mse = best;
    return result;
  }

  const std::vector<Eigen::ArrayXd> channels = x.split_channels();
  std::vector<ChannelSweep> sweeps;
  sweeps.reserve(channels.size());
  for (const auto& ch : channels) sweeps.push_back(sweep_channel(ch));

  std::array<int, kMantissaChoices> votes{};
  std::array<double, kMantissaChoices> cumulative{};
  bool any_vote = false;
  for (std::size_t k = 0; k < sweeps.size(); ++k) {
    const ChannelSweep& s = sweeps[k];
    if (s.degenerate) {
      result.degenerate_channels.push_back(k);
      continue;
    }
    any_vote = true;
    const auto best = std::min_element(s.best_mse.begin(), s.best_mse.end());
    ++votes[static_cast<std::size_t>(best - s.best_mse.begin())];
    for (int i = 0; i < kMantissaChoices; ++i) cumulative[i] += s.best_mse[i];
  }

  int winner = 0;
  if (any_vote) {
    for (int i = 1; i < kMantissaChoices; ++i) {
      if (votes[i] > votes[winner] || (votes[i] == votes[winner] && cumulative[i] < cumulative[winner])) {
        winner = i;
      }
    }
  }
  result.mantissa_bits = kSearchMinMantissa + winner;
  result.exponent_bits = kEightBitMagnitudeBits - result.mantissa_bits;

  double weighted = 0.0;
  for (std::size_t k = 0; k < sweeps.size(); ++k) {
    const ChannelSweep& s = sweeps[k];
    const double c = s.degenerate ? degenerate_clip(result.mantissa_bits) : s.best_clip[winner];
    const double mse = s.degenerate ? 0.0 : s.best_mse[winner];
    result.clip.push_back(c);
    result.mse.push_back(mse);
    weighted += mse * static_cast<double>(channels[k].size());
  }
  result.total_mse = weighted / static_cast<double>(x.size());
  return result;
}

}  // namespace fpq
