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

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "fpq/formats.hpp"
#include "fpq/quadrature.hpp"

namespace fpq {

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

struct Uniform {
  double lower = -1.0;
  double upper = 1.0;
};

/// Standard (unit-scale, zero-location) Student's t.
struct StudentT {
  double dof = 2.0;
};

/// A parametric density restricted to [clip_min, clip_max].
///
/// The density is not renormalized after clipping: integrals over the clip
/// range use the family density as-is, so tail mass outside the range is
/// simply dropped.
class Distribution {
 public:
  using Family = std::variant<Gaussian, Uniform, StudentT>;

  Distribution(Family family, double clip_min, double clip_max);

  /// Clip range mean +/- 8 stddev.
  static Distribution gaussian(double mean, double stddev);
  static Distribution gaussian(double mean, double stddev, double clip_min, double clip_max);
  /// Clip range [lower, upper].
  static Distribution uniform(double lower, double upper);
  static Distribution student_t(double dof, double clip_min = -100.0, double clip_max = 100.0);

  [[nodiscard]] const Family& family() const { return family_; }
  [[nodiscard]] double clip_min() const { return clip_min_; }
  [[nodiscard]] double clip_max() const { return clip_max_; }
  [[nodiscard]] double clip_abs_max() const;
  [[nodiscard]] Distribution with_clip(double clip_min, double clip_max) const;

  /// Unclipped family density.
  [[nodiscard]] double pdf(double w) const;

  /// "gaussian", "uniform" or "student_t".
  [[nodiscard]] std::string family_name() const;
  /// Parameters as "mu=0;sigma=1" style text.
  [[nodiscard]] std::string param_string() const;

 private:
  Family family_;
  double clip_min_;
  double clip_max_;
  double norm_ = 1.0;  // cached normalization constant of the family density
};

/// Rounding and clipping parts of the expected squared quantization error.
struct ErrorBreakdown {
  double rounding = 0.0;
  double clipping = 0.0;
  [[nodiscard]] double total() const { return rounding + clipping; }
};

/// I(a, b, x0) = integral over [a, b] of (w - x0)^2 p(w). Requires
/// clip_min <= a <= b <= clip_max. Closed form for Gaussian and Uniform,
/// adaptive quadrature for Student's t.
double moment_integral_I(const Distribution& d, double a, double b, double x0);

/// J(a, b, x0) = integral over [a, b] of w (w - x0) p(w); same domain rules as I.
double moment_integral_J(const Distribution& d, double a, double b, double x0);

/// Student's t I(a, b, x0) through the 2F1 closed form. nullopt when the
/// hypergeometric series does not converge (large |a|, |b|).
std::optional<double> student_t_integral_I_closed(const Distribution& d, double a, double b, double x0);

/// In-range rounding error: midpoint split of every grid interval, intersected
/// with the clip range.
double rounding_error(const QuantGrid& grid, const Distribution& d);

/// Error from clip-range mass outside [grid.min(), grid.max()].
double clipping_error(const QuantGrid& grid, const Distribution& d);

ErrorBreakdown expected_mse(const QuantGrid& grid, const Distribution& d);

/// Second non-central moment over the clip range, I(clip_min, clip_max, 0).
double second_moment(const Distribution& d);

/// E[w R(w)] with R(w) = Q(w) - w, over the clip range.
double cross_error(const QuantGrid& grid, const Distribution& d);

/// Expected squared error of a scalar product of independent W and X when both
/// inputs are quantized (all six terms).
double scalar_product_mse(const QuantGrid& grid_w, const Distribution& w, const QuantGrid& grid_x,
                          const Distribution& x);

/// Leading two terms of scalar_product_mse: E_rw M_x + E_rx M_w.
double scalar_product_mse_approx(const QuantGrid& grid_w, const Distribution& w,
                                 const QuantGrid& grid_x, const Distribution& x);

/// 10 log10(signal_power / mse); +infinity when mse == 0.
double sqnr_db(double signal_power, double mse);
double sqnr_db(const Distribution& d, const QuantGrid& grid);

/// Expected MSE by adaptive quadrature of (w - Q(w))^2 p(w), with Q found by
/// nearest-point search. Integrates each half-interval separately so the
/// integrand is smooth on every piece.
QuadratureResult quadrature_mse_oracle(const QuantGrid& grid, const Distribution& d,
                                       double abs_tol = 1e-12);

/// Minimizes a piecewise-smooth function of the clipping value on [lo, hi]:
/// log-spaced scan to bracket, then golden-section refinement. Ties resolve to
/// the smaller clipping value.
double minimize_clip(const std::function<double(double)>& objective, double lo, double hi);

/// Format of the given layout whose bias minimizes expected MSE for d, with the
/// clipping value searched over [0.05, 2] * clip_abs_max.
FpFormat optimal_fp_format(int mantissa_bits, int exponent_bits, const Distribution& d);

/// Scale minimizing expected MSE for an n-bit integer grid (grid max = scale * (2^(n-1) - 1)).
IntFormat optimal_int_format(int bit_width, const Distribution& d);

/// Integer format whose largest code maps to `max_value`.
IntFormat int_format_from_max(int bit_width, double max_value);

}  // namespace fpq
