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

#include "fpq/quantsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fpq {

FpQuantizer::FpQuantizer(const FpFormat& format, Rounding rounding)
    : format_(format), rounding_(rounding), bias_(split_bias(format.bias)) {
  const int m = format.mantissa_bits;
  subnormal_exponent_ = 1 - bias_.whole - m;
  const int top_exponent = (1 << format.exponent_bits) - 1;
  top_ = std::ldexp(std::ldexp(1.0, m + 1) - 1.0, top_exponent - bias_.whole - m);
  clip_value_ = top_ * bias_.frac_scale;
}

double FpQuantizer::operator()(double x) const {
  if (!std::isfinite(x)) throw TensorError("cannot quantize non-finite value");
  if (x == 0.0) return 0.0;
  // Work in the integer-bias domain: y = |x| * 2^frac(bias).
  const double y = std::fabs(x) * bias_.inv_frac_scale;
  const int binade = std::ilogb(y) + bias_.whole;
  const int scale_exponent = binade > 1 ? binade - bias_.whole - format_.mantissa_bits
                                        : subnormal_exponent_;
  const double scaled = std::ldexp(y, -scale_exponent);
  const double n = rounding_ == Rounding::kNearestEven ? std::nearbyint(scaled) : std::round(scaled);
  double v = std::ldexp(n, scale_exponent);
  if (v > top_) v = top_;
  if (v == 0.0) return 0.0;
  return std::copysign(v * bias_.frac_scale, x);
}

double quantize_fp(double x, const FpFormat& format, Rounding rounding) {
  return FpQuantizer(format, rounding)(x);
}

Eigen::ArrayXd quantize_fp(const Eigen::Ref<const Eigen::ArrayXd>& x, const FpFormat& format,
                           Rounding rounding) {
  const FpQuantizer q(format, rounding);
  return x.unaryExpr([&q](double v) { return q(v); });
}

namespace {

void check_channel_params(const Tensor& x, const QuantizerConfig& config) {
  if (config.per_channel() && config.channel_params.size() != x.channels()) {
    throw TensorError("per-channel parameter count " + std::to_string(config.channel_params.size()) +
                      " does not match " + std::to_string(x.channels()) + " channels");
  }
  if (config.per_channel() && !x.channel_axis()) {
    throw TensorError("per-channel quantization needs a channel axis");
  }
}

}  // namespace

Tensor quantize_fp(const Tensor& x, const QuantizerConfig& config) {
  const auto* format = std::get_if<FpFormat>(&config.format);
  if (format == nullptr) throw FormatError("quantize_fp needs a floating-point format");
  check_channel_params(x, config);
  if (!config.per_channel()) return x.with_data(quantize_fp(x.data(), *format));

  std::vector<FpQuantizer> quantizers;
  quantizers.reserve(config.channel_params.size());
  for (double bias : config.channel_params) {
    quantizers.emplace_back(FpFormat::make(format->mantissa_bits, format->exponent_bits, bias));
  }
  Eigen::ArrayXd out(x.data().size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = quantizers[x.channel_of(static_cast<std::size_t>(i))](x.data()[i]);
  }
  return x.with_data(std::move(out));
}

double quantize_fp_oracle(double x, const QuantGrid& grid) {
  const auto values = grid.values();
  if (x <= values.front()) return values.front();
  if (x >= values.back()) return values.back();
  const auto hi_it = std::lower_bound(values.begin(), values.end(), x);
  const auto hi = static_cast<std::size_t>(hi_it - values.begin());
  if (values[hi] == x) return x;
  const std::size_t lo = hi - 1;
  const double below = x - values[lo];
  const double above = values[hi] - x;
  if (below < above) return values[lo];
  if (above < below) return values[hi];
  return grid.magnitude_code(lo) % 2 == 0 ? values[lo] : values[hi];
}

double quantize_int(double x, const IntFormat& format) {
  if (!std::isfinite(x)) throw TensorError("cannot quantize non-finite value");
  const double code = std::clamp(std::nearbyint(x / format.scale), static_cast<double>(format.code_min()),
                                 static_cast<double>(format.code_max()));
  return code == 0.0 ? 0.0 : format.scale * code;
}

Eigen::ArrayXd quantize_int(const Eigen::Ref<const Eigen::ArrayXd>& x, const IntFormat& format) {
  return x.unaryExpr([&format](double v) { return quantize_int(v, format); });
}

Tensor quantize_int(const Tensor& x, const IntFormat& format) {
  return x.with_data(quantize_int(x.data(), format));
}

Tensor quantize(const Tensor& x, const QuantizerConfig& config) {
  if (std::holds_alternative<FpFormat>(config.format)) return quantize_fp(x, config);
  const auto& format = std::get<IntFormat>(config.format);
  check_channel_params(x, config);
  if (!config.per_channel()) return quantize_int(x, format);
  Eigen::ArrayXd out(x.data().size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double scale = config.channel_params[x.channel_of(static_cast<std::size_t>(i))];
    out[i] = quantize_int(x.data()[i], IntFormat::make(format.bit_width, scale));
  }
  return x.with_data(std::move(out));
}

double empirical_mse(const Eigen::Ref<const Eigen::ArrayXd>& x,
                     const Eigen::Ref<const Eigen::ArrayXd>& quantized) {
  if (x.size() != quantized.size()) throw TensorError("empirical_mse: size mismatch");
  if (x.size() == 0) return 0.0;
  return (x - quantized).square().mean();
}

double empirical_mse(const Tensor& x, const Tensor& quantized) {
  if (x.shape() != quantized.shape()) throw TensorError("empirical_mse: shape mismatch");
  return empirical_mse(x.data(), quantized.data());
}

}  // namespace fpq
