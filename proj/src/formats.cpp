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

#include "fpq/formats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fpq {

namespace {

constexpr int kMaxExponentBits = 10;  // keeps 2^(2^e) inside binary64
constexpr int kMaxMantissaBits = 52;

}  // namespace

FpFormat FpFormat::make(int mantissa_bits, int exponent_bits, double bias) {
  if (mantissa_bits < 0 || mantissa_bits > kMaxMantissaBits) {
    throw FormatError("mantissa bits must be in [0, 52], got " + std::to_string(mantissa_bits));
  }
  if (exponent_bits < 1 || exponent_bits > kMaxExponentBits) {
    throw FormatError("exponent bits must be in [1, 10], got " + std::to_string(exponent_bits));
  }
  if (!std::isfinite(bias)) throw FormatError("bias must be finite");
  return FpFormat{mantissa_bits, exponent_bits, bias};
}

FpFormat FpFormat::with_standard_bias(int mantissa_bits, int exponent_bits) {
  if (exponent_bits < 1 || exponent_bits > kMaxExponentBits) {
    throw FormatError("exponent bits must be in [1, 10], got " + std::to_string(exponent_bits));
  }
  return make(mantissa_bits, exponent_bits, std::ldexp(1.0, exponent_bits - 1));
}

IntFormat IntFormat::make(int bit_width, double scale) {
  if (bit_width < 2 || bit_width > 32) {
    throw FormatError("integer bit width must be in [2, 32], got " + std::to_string(bit_width));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw FormatError("integer scale must be positive and finite");
  return IntFormat{bit_width, scale};
}

BiasParts split_bias(double bias) {
  const double whole = std::floor(bias);
  const double frac = bias - whole;
  BiasParts parts;
  parts.whole = static_cast<int>(whole);
  if (frac != 0.0) {
    parts.frac_scale = std::exp2(-frac);
    parts.inv_frac_scale = std::exp2(frac);
  }
  return parts;
}

QuantGrid::QuantGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw FormatError("quantization grid must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw FormatError("quantization grid values must be finite");
    if (i > 0 && !(values_[i - 1] < values_[i])) {
      throw FormatError("quantization grid must be strictly increasing");
    }
    if (values_[i] == 0.0) {
      values_[i] = 0.0;  // collapse -0
      zero_index_ = i;
    }
  }
}

std::size_t QuantGrid::magnitude_code(std::size_t i) const {
  const std::size_t origin = zero_index_.value_or(0);
  return i >= origin ? i - origin : origin - i;
}

double max_representable(const FpFormat& f) {
  const BiasParts b = split_bias(f.bias);
  const int top_exponent = (1 << f.exponent_bits) - 1;
  const double top_code = std::ldexp(1.0, f.mantissa_bits + 1) - 1.0;
  return std::ldexp(top_code, top_exponent - b.whole - f.mantissa_bits) * b.frac_scale;
}

double min_subnormal(const FpFormat& f) {
  const BiasParts b = split_bias(f.bias);
  return std::ldexp(1.0, 1 - b.whole - f.mantissa_bits) * b.frac_scale;
}

double min_normal(const FpFormat& f) {
  const BiasParts b = split_bias(f.bias);
  return std::ldexp(1.0, 1 - b.whole) * b.frac_scale;
}

QuantGrid enumerate_grid(const FpFormat& f) {
  if (f.bit_width() > kMaxEnumerationBits) {
    throw FormatError("format too wide to enumerate (" + std::to_string(f.bit_width()) + " bits > 16)");
  }
  const BiasParts b = split_bias(f.bias);
  const int m = f.mantissa_bits;
  const std::uint32_t codes = 1u << (f.mantissa_bits + f.exponent_bits);
  const std::uint32_t mantissa_mask = (1u << m) - 1;

  // Positive magnitudes in code order are strictly increasing.
  std::vector<double> positive;
  positive.reserve(codes);
  for (std::uint32_t code = 0; code < codes; ++code) {
    const int p = static_cast<int>(code >> m);
    const double k = static_cast<double>(code & mantissa_mask);
    const double v = p == 0 ? std::ldexp(k, 1 - b.whole - m)
                            : std::ldexp(std::ldexp(1.0, m) + k, p - b.whole - m);
    positive.push_back(v * b.frac_scale);
  }

  std::vector<double> values;
  values.reserve(2 * codes - 1);
  for (auto it = positive.rbegin(); it != positive.rend() - 1; ++it) values.push_back(-*it);
  values.insert(values.end(), positive.begin(), positive.end());
  return QuantGrid(std::move(values));
}

QuantGrid enumerate_int_grid(const IntFormat& f) {
  if (f.bit_width > kMaxEnumerationBits) {
    throw FormatError("integer format too wide to enumerate");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(f.code_max() - f.code_min() + 1));
  for (std::int64_t k = f.code_min(); k <= f.code_max(); ++k) {
    values.push_back(f.scale * static_cast<double>(k));
  }
  return QuantGrid(std::move(values));
}

double bias_from_max(double c, int mantissa_bits, int exponent_bits) {
  if (!(c > 0.0) || !std::isfinite(c)) throw FormatError("clipping value must be positive and finite");
  const double top_significand = 2.0 - std::ldexp(1.0, -mantissa_bits);
  return std::ldexp(1.0, exponent_bits) - 1.0 + std::log2(top_significand / c);
}

FpFormat format_from_max(double c, int mantissa_bits, int exponent_bits) {
  return FpFormat::make(mantissa_bits, exponent_bits, bias_from_max(c, mantissa_bits, exponent_bits));
}

std::string layout_name(int mantissa_bits, int exponent_bits) {
  return std::to_string(mantissa_bits) + "M" + std::to_string(exponent_bits) + "E";
}

}  // namespace fpq
