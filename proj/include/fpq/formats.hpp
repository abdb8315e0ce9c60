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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpq {

/// Thrown when a number format or grid is constructed with invalid parameters.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sign + `exponent_bits` + `mantissa_bits` floating-point layout with a
/// real-valued bias. A per-tensor scale gamma is folded in as
/// bias = b - log2(gamma). Every exponent code is a finite value: there are no
/// Inf/NaN encodings.
struct FpFormat {
  int mantissa_bits = 3;
  int exponent_bits = 4;
  double bias = 8.0;

  /// Validating constructor.
  static FpFormat make(int mantissa_bits, int exponent_bits, double bias);

  /// Standard IEEE-style bias 2^(e-1).
  static FpFormat with_standard_bias(int mantissa_bits, int exponent_bits);

  [[nodiscard]] int bit_width() const { return mantissa_bits + exponent_bits + 1; }

  friend bool operator==(const FpFormat&, const FpFormat&) = default;
};

/// Symmetric signed integer format; codes are [-2^(n-1), 2^(n-1) - 1].
struct IntFormat {
  int bit_width = 8;
  double scale = 1.0;

  static IntFormat make(int bit_width, double scale);

  [[nodiscard]] std::int64_t code_min() const { return -(std::int64_t{1} << (bit_width - 1)); }
  [[nodiscard]] std::int64_t code_max() const { return (std::int64_t{1} << (bit_width - 1)) - 1; }

  friend bool operator==(const IntFormat&, const IntFormat&) = default;
};

/// The bias split as floor(bias) and the residual multiplier 2^-(bias - floor(bias)).
/// Grid values and quantizer outputs are both formed as ldexp(n, q) * frac_scale,
/// which keeps the two paths bit-identical for fractional biases.
struct BiasParts {
  int whole = 0;
  double frac_scale = 1.0;
  double inv_frac_scale = 1.0;
};
BiasParts split_bias(double bias);

/// Sorted, duplicate-free list of representable values.
class QuantGrid {
 public:
  explicit QuantGrid(std::vector<double> values);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double min() const { return values_.front(); }
  [[nodiscard]] double max() const { return values_.back(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  /// Index of the value 0 when present. Used as the origin of magnitude codes.
  [[nodiscard]] std::optional<std::size_t> zero_index() const { return zero_index_; }

  /// Magnitude code of element i: its distance in grid steps from 0 (or from
  /// the first element for grids without 0). For FP grids this equals the
  /// exponent/mantissa bit pattern without the sign.
  [[nodiscard]] std::size_t magnitude_code(std::size_t i) const;

 private:
  std::vector<double> values_;
  std::optional<std::size_t> zero_index_;
};

/// Largest representable value c = (2 - 2^-m) 2^(2^e - bias - 1).
double max_representable(const FpFormat& f);

/// Smallest positive value 2^(1 - bias - m).
double min_subnormal(const FpFormat& f);

/// Smallest positive normal value 2^(1 - bias).
double min_normal(const FpFormat& f);

/// All values of the format, both signs and 0 once. Requires bit width <= 16.
QuantGrid enumerate_grid(const FpFormat& f);

/// {s*k : k in [-2^(n-1), 2^(n-1) - 1]}. Requires n <= 16.
QuantGrid enumerate_int_grid(const IntFormat& f);

/// Bias for which max_representable(m, e, bias) == c.
double bias_from_max(double c, int mantissa_bits, int exponent_bits);

/// Format with the given layout whose largest value is c.
FpFormat format_from_max(double c, int mantissa_bits, int exponent_bits);

/// "5M2E" style name.
std::string layout_name(int mantissa_bits, int exponent_bits);

inline constexpr int kMaxEnumerationBits = 16;

}  // namespace fpq
