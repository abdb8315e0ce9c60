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

#include "fpq/notation.hpp"

#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

namespace fpq {

namespace {

double parse_real(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw ParseError("invalid " + std::string(what) + " '" + s + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string FormatSpec::layout() const {
  return is_int ? "INT" + std::to_string(bit_width) : layout_name(mantissa_bits, exponent_bits);
}

FormatSpec parse_format(std::string_view text) {
  static const std::regex fp_re(R"((\d+)M(\d+)E)", std::regex::icase);
  static const std::regex int_re(R"(INT(\d+))", std::regex::icase);

  const std::size_t colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const std::string_view tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  FormatSpec spec;
  std::smatch match;
  if (std::regex_match(head, match, fp_re)) {
    spec.mantissa_bits = std::stoi(match[1]);
    spec.exponent_bits = std::stoi(match[2]);
    if (spec.exponent_bits < 1 || spec.mantissa_bits + spec.exponent_bits > 7) {
      throw ParseError("format '" + head + "' must have e >= 1 and m + e <= 7");
    }
  } else if (std::regex_match(head, match, int_re)) {
    spec.is_int = true;
    spec.bit_width = std::stoi(match[1]);
    if (spec.bit_width < 2 || spec.bit_width > 16) throw ParseError("INT width must be in [2, 16]");
  } else {
    throw ParseError("unrecognized format '" + std::string(text) + "'");
  }

  if (colon == std::string_view::npos) return spec;
  const std::string_view key = spec.is_int ? "s=" : "b=";
  if (tail == "auto") {
    spec.mode = ParamMode::kAuto;
  } else if (tail == "minmax") {
    spec.mode = ParamMode::kMinMax;
  } else if (tail.substr(0, 2) == key) {
    spec.mode = ParamMode::kExplicit;
    spec.value = parse_real(tail.substr(2), spec.is_int ? "scale" : "bias");
    if (spec.is_int && !(spec.value > 0.0)) throw ParseError("INT scale must be positive");
  } else {
    throw ParseError("unrecognized format option '" + std::string(tail) + "'");
  }
  return spec;
}

std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec) {
  switch (spec.mode) {
    case ParamMode::kDefault:
      if (spec.is_int) return IntFormat::make(spec.bit_width, 1.0);
      return FpFormat::with_standard_bias(spec.mantissa_bits, spec.exponent_bits);
    case ParamMode::kExplicit:
      if (spec.is_int) return IntFormat::make(spec.bit_width, spec.value);
      return FpFormat::make(spec.mantissa_bits, spec.exponent_bits, spec.value);
    case ParamMode::kAuto:
    case ParamMode::kMinMax:
      break;
  }
  throw ParseError("format " + spec.layout() + " needs data to choose its " + (spec.is_int ? "scale" : "bias"));
}

std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec, double absmax) {
  if (spec.mode == ParamMode::kAuto) {
    throw ParseError("':auto' applies to distributions; use the format search for tensors");
  }
  if (spec.mode != ParamMode::kMinMax) return resolve_format(spec);
  if (!(absmax > 0.0)) throw ParseError("':minmax' needs data with a nonzero maximum");
  if (spec.is_int) return int_format_from_max(spec.bit_width, absmax);
  return format_from_max(absmax, spec.mantissa_bits, spec.exponent_bits);
}

std::variant<FpFormat, IntFormat> resolve_format(const FormatSpec& spec, const Distribution& d) {
  if (spec.mode == ParamMode::kAuto) {
    if (spec.is_int) return optimal_int_format(spec.bit_width, d);
    return optimal_fp_format(spec.mantissa_bits, spec.exponent_bits, d);
  }
  if (spec.mode == ParamMode::kMinMax) return resolve_format(spec, d.clip_abs_max());
  return resolve_format(spec);
}

Distribution parse_distribution(std::string_view text) {
  std::string_view body = text;
  std::string_view range;
  if (const auto at = text.find('@'); at != std::string_view::npos) {
    body = text.substr(0, at);
    range = text.substr(at + 1);
  }
  const auto parts = split(body, ':');
  const std::string family(parts[0]);

  std::optional<std::pair<double, double>> clip;
  if (!range.empty()) {
    const auto bounds = split(range, ':');
    if (bounds.size() != 2) throw ParseError("clip range must be '@<lo>:<hi>'");
    clip = {{parse_real(bounds[0], "clip bound"), parse_real(bounds[1], "clip bound")}};
  } else if (text.find('@') != std::string_view::npos) {
    throw ParseError("empty clip range");
  }

  auto expect = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw ParseError(family + " takes " + std::to_string(n) + " parameter" + (n == 1 ? "" : "s"));
    }
  };
  try {
    if (family == "gaussian" || family == "normal") {
      expect(2);
      const double mean = parse_real(parts[1], "mean");
      const double stddev = parse_real(parts[2], "stddev");
      return clip ? Distribution::gaussian(mean, stddev, clip->first, clip->second)
                  : Distribution::gaussian(mean, stddev);
    }
    if (family == "uniform") {
      expect(2);
      const double lower = parse_real(parts[1], "lower bound");
      const double upper = parse_real(parts[2], "upper bound");
      const Distribution d = Distribution::uniform(lower, upper);
      return clip ? d.with_clip(clip->first, clip->second) : d;
    }
    if (family == "student" || family == "student_t") {
      expect(1);
      const double dof = parse_real(parts[1], "degrees of freedom");
      return clip ? Distribution::student_t(dof, clip->first, clip->second) : Distribution::student_t(dof);
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ParseError*>(&e) != nullptr) throw;
    throw ParseError("invalid distribution '" + std::string(text) + "': " + e.what());
  }
  throw ParseError("unknown distribution family '" + family + "'");
}

double format_parameter(const std::variant<FpFormat, IntFormat>& format) {
  if (const auto* fp = std::get_if<FpFormat>(&format)) return fp->bias;
  return std::get<IntFormat>(format).scale;
}

QuantGrid format_grid(const std::variant<FpFormat, IntFormat>& format) {
  if (const auto* fp = std::get_if<FpFormat>(&format)) return enumerate_grid(*fp);
  return enumerate_int_grid(std::get<IntFormat>(format));
}

}  // namespace fpq
