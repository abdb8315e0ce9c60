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

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "fpq/analytic.hpp"
#include "fpq/formats.hpp"
#include "fpq/tensor.hpp"

namespace fpq {

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How the bias (FP) or scale (INT) of a parsed format is chosen.
enum class ParamMode {
  kDefault,   // FP bias 2^(e-1), INT scale 1
  kExplicit,  // ":b=<real>" or ":s=<real>"
  kAuto,      // MSE-optimal for a distribution
  kMinMax,    // grid max matches the data's absolute maximum
};

/// A parsed "<m>M<e>E[:b=<real>|:auto|:minmax]" or "INT<n>[:s=<real>|:auto|:minmax]".
struct FormatSpec {
  bool is_int = false;
  int mantissa_bits = 0;
  int exponent_bits = 0;
  int bit_width = 0;
  ParamMode mode = ParamMode::kDefault;
  double value = 0.0;  // explicit bias or scale

  /// "5M2E" or "INT8".
  [[nodiscard]] std::string layout() const;
};

/// FP layouts must have e >= 1 and m + e <= 7; INT widths must be in [2, 16].
FormatSpec parse_format(std::string_view text);

/// Concrete grid format. kAuto optimizes expected MSE against `d`; kMinMax
/// matches d's largest clip magnitude.
std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec, const Distribution& d);

/// Concrete format for tensor data. kMinMax uses absmax; kAuto is rejected
/// (use the format search instead).
std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec, double absmax);

/// Format with kDefault / kExplicit parameters; kAuto and kMinMax are rejected.
std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec);

/// "<family>:<p1>[:<p2>][@<lo>:<hi>]" with family gaussian (mean, stddev),
/// uniform (lower, upper) or student (dof). Default clip ranges are
/// mean +/- 8 stddev, [lower, upper] and [-100, 100].
Distribution parse_distribution(std::string_view text);

/// Bias for FP formats, scale for INT formats.
double format_parameter(const std::variant<FpFormat, IntFormat>& format);

/// Grid of either format kind.
QuantGrid format_grid(const std::variant<FpFormat, IntFormat>& format);

}  // namespace fpq
