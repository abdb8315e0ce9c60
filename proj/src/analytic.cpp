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

#include "fpq/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fpq/quantsim.hpp"
#include "fpq/special.hpp"

namespace fpq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_interval(const Distribution& d, double a, double b) {
  if (!(d.clip_min() <= a && a <= b && b <= d.clip_max())) {
    throw std::invalid_argument("moment integral interval [" + format_number(a) + ", " + format_number(b) +
                                "] is not inside the clip range");
  }
}

constexpr double kTailStart = 3.0;

// T_k = integral over t >= 0 of t^k exp(-alpha t - t^2 / 2), k = 0, 1, 2, from
// the Mills-ratio continued fraction T_k / T_(k-1) = k / (alpha + T_(k+1) / T_k).
// Accurate to the last bit for alpha >= kTailStart at this depth.
std::array<double, 3> tail_moments(double alpha) {
  double r = 0.0;
  for (int k = 64; k >= 3; --k) r = k / (alpha + r);
  const double r2 = 2.0 / (alpha + r);
  const double r1 = 1.0 / (alpha + r2);
  const double t0 = 1.0 / (alpha + r1);
  return {t0, r1 * t0, r2 * r1 * t0};
}

// Moments S_k = integral over [a, b] of (w - a)^k p(w), k = 0, 1, 2, divided by
// s^k, for a Gaussian with (a - mean) / s >= kTailStart. Expanding around the
// near endpoint keeps full relative precision far out in the tail, where
// differences of normal CDFs lose everything.
std::array<double, 3> upper_tail_moments(const Gaussian& g, double a, double b) {
  const double s = g.stddev;
  const double za = (a - g.mean) / s;
  const double len = (b - a) / s;
  const double scale = normal_pdf(za);
  const auto ta = tail_moments(za);
  const double decay = std::exp(-len * (za + 0.5 * len));
  std::array<double, 3> out = ta;
  if (decay > 0.0) {
    const auto tb = tail_moments(za + len);
    out[0] -= decay * tb[0];
    out[1] -= decay * (tb[1] + len * tb[0]);
    out[2] -= decay * (tb[2] + 2.0 * len * tb[1] + len * len * tb[0]);
  }
  for (double& v : out) v *= scale;
  return out;
}

struct TailFrame {
  Gaussian g;
  double a, b, x0, sign;
};

// Mirrors a lower-tail interval onto the upper tail; nullopt if neither applies.
std::optional<TailFrame> tail_frame(const Gaussian& g, double a, double b, double x0) {
  if ((a - g.mean) / g.stddev >= kTailStart) return TailFrame{g, a, b, x0, 1.0};
  if ((b - g.mean) / g.stddev <= -kTailStart) return TailFrame{{-g.mean, g.stddev}, -b, -a, -x0, -1.0};
  return std::nullopt;
}

// Integral of (w - x0)^2 p(w) for an unclipped Gaussian, written around x0 so
// that narrow intervals near x0 do not cancel catastrophically.
double gaussian_I(const Gaussian& g, double a, double b, double x0) {
  if (const auto t = tail_frame(g, a, b, x0)) {
    const auto m = upper_tail_moments(t->g, t->a, t->b);
    if (!(m[0] > 0.0)) return 0.0;
    const double s = t->g.stddev;
    const double mean = m[1] / m[0];
    const double offset = t->a - t->x0 + s * mean;
    return m[0] * offset * offset + s * s * std::max(0.0, m[2] - m[1] * mean);
  }
  const double s = g.stddev;
  const double shift = g.mean - x0;
  const double za = (a - g.mean) / s;
  const double zb = (b - g.mean) / s;
  const double mass = normal_mass(za, zb);
  const double pa = normal_pdf(za);
  const double pb = normal_pdf(zb);
  return shift * shift * mass + 2.0 * shift * s * (pa - pb) + s * s * (mass - (zb * pb - za * pa));
}

// Integral of (w - x0) p(w).
double gaussian_first_about(const Gaussian& g, double a, double b, double x0) {
  if (const auto t = tail_frame(g, a, b, x0)) {
    const auto m = upper_tail_moments(t->g, t->a, t->b);
    return t->sign * ((t->a - t->x0) * m[0] + t->g.stddev * m[1]);
  }
  const double s = g.stddev;
  const double za = (a - g.mean) / s;
  const double zb = (b - g.mean) / s;
  return (g.mean - x0) * normal_mass(za, zb) + s * (normal_pdf(za) - normal_pdf(zb));
}

double uniform_I(const Uniform& u, double a, double b, double x0) {
  const double lo = std::max(a, u.lower);
  const double hi = std::min(b, u.upper);
  if (!(lo < hi)) return 0.0;
  const double p0 = 1.0 / (u.upper - u.lower);
  const double dh = hi - x0;
  const double dl = lo - x0;
  return p0 * (dh * dh * dh - dl * dl * dl) / 3.0;
}

double uniform_first_about(const Uniform& u, double a, double b, double x0) {
  const double lo = std::max(a, u.lower);
  const double hi = std::min(b, u.upper);
  if (!(lo < hi)) return 0.0;
  const double p0 = 1.0 / (u.upper - u.lower);
  return p0 * ((hi - x0) * (hi - x0) - (lo - x0) * (lo - x0)) / 2.0;
}

double quadrature_value(const Distribution& d, double a, double b, const std::function<double(double)>& g) {
  if (a == b) return 0.0;
  return integrate_adaptive([&](double w) { return g(w) * d.pdf(w); }, a, b, 1e-16, 1e-12).value;
}

double student_norm(double dof) {
  return std::exp(std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0)) /
         std::sqrt(dof * std::numbers::pi);
}

// Invokes piece(a, b, q, clipped) for every interval of the clip range on which
// the quantizer maps to the constant q; `clipped` marks the parts outside the grid.
template <class Piece>
void for_each_piece(const QuantGrid& grid, const Distribution& d, Piece&& piece) {
  const double wmin = d.clip_min();
  const double wmax = d.clip_max();
  auto emit = [&](double a, double b, double q, bool clipped = false) {
    const double lo = std::max(a, wmin);
    const double hi = std::min(b, wmax);
    if (lo < hi) piece(lo, hi, q, clipped);
  };
  if (wmin < grid.min()) emit(wmin, grid.min(), grid.min(), true);
  const auto values = grid.values();
  // Only intervals that intersect the clip range contribute.
  auto first = std::upper_bound(values.begin(), values.end(), wmin);
  std::size_t start = first == values.begin() ? 0 : static_cast<std::size_t>(first - values.begin()) - 1;
  for (std::size_t i = start; i + 1 < values.size(); ++i) {
    const double lo = values[i];
    const double hi = values[i + 1];
    if (lo >= wmax) break;
    const double mid = lo + (hi - lo) / 2.0;
    emit(lo, mid, lo);
    emit(mid, hi, hi);
  }
  if (grid.max() < wmax) emit(grid.max(), wmax, grid.max(), true);
}

}  // namespace

Distribution::Distribution(Family family, double clip_min, double clip_max)
    : family_(family), clip_min_(clip_min), clip_max_(clip_max) {
  if (!std::isfinite(clip_min) || !std::isfinite(clip_max) || !(clip_min < clip_max)) {
    throw std::invalid_argument("clip range must be finite with clip_min < clip_max");
  }
  std::visit(Overloaded{
                 [](const Gaussian& g) {
                   if (!(g.stddev > 0.0) || !std::isfinite(g.mean) || !std::isfinite(g.stddev)) {
                     throw std::invalid_argument("gaussian needs finite mean and stddev > 0");
                   }
                 },
                 [](const Uniform& u) {
                   if (!(u.lower < u.upper) || !std::isfinite(u.lower) || !std::isfinite(u.upper)) {
                     throw std::invalid_argument("uniform needs finite bounds with lower < upper");
                   }
                 },
                 [this](const StudentT& t) {
                   if (!(t.dof > 0.0) || !std::isfinite(t.dof)) {
                     throw std::invalid_argument("student_t needs dof > 0");
                   }
                   norm_ = student_norm(t.dof);
                 },
             },
             family_);
}

Distribution Distribution::gaussian(double mean, double stddev) {
  return gaussian(mean, stddev, mean - 8.0 * stddev, mean + 8.0 * stddev);
}

Distribution Distribution::gaussian(double mean, double stddev, double clip_min, double clip_max) {
  return Distribution(Gaussian{mean, stddev}, clip_min, clip_max);
}

Distribution Distribution::uniform(double lower, double upper) {
  return Distribution(Uniform{lower, upper}, lower, upper);
}

Distribution Distribution::student_t(double dof, double clip_min, double clip_max) {
  return Distribution(StudentT{dof}, clip_min, clip_max);
}

double Distribution::clip_abs_max() const { return std::max(std::fabs(clip_min_), std::fabs(clip_max_)); }

Distribution Distribution::with_clip(double clip_min, double clip_max) const {
  return Distribution(family_, clip_min, clip_max);
}

double Distribution::pdf(double w) const {
  return std::visit(Overloaded{
                        [w](const Gaussian& g) { return normal_pdf((w - g.mean) / g.stddev) / g.stddev; },
                        [w](const Uniform& u) { return (w >= u.lower && w <= u.upper) ? 1.0 / (u.upper - u.lower) : 0.0; },
                        [w, this](const StudentT& t) {
                          return norm_ * std::pow(1.0 + w * w / t.dof, -(t.dof + 1.0) / 2.0);
                        },
                    },
                    family_);
}

std::string Distribution::family_name() const {
  return std::visit(Overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const StudentT&) { return std::string("student_t"); },
                    },
                    family_);
}

std::string Distribution::param_string() const {
  return std::visit(Overloaded{
                        [](const Gaussian& g) { return "mu=" + format_number(g.mean) + ";sigma=" + format_number(g.stddev); },
                        [](const Uniform& u) { return "a=" + format_number(u.lower) + ";b=" + format_number(u.upper); },
                        [](const StudentT& t) { return "nu=" + format_number(t.dof); },
                    },
                    family_);
}

double moment_integral_I(const Distribution& d, double a, double b, double x0) {
  check_interval(d, a, b);
  if (a == b) return 0.0;
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian_I(g, a, b, x0); },
                        [&](const Uniform& u) { return uniform_I(u, a, b, x0); },
                        [&](const StudentT&) {
                          return quadrature_value(d, a, b, [x0](double w) { return (w - x0) * (w - x0); });
                        },
                    },
                    d.family());
}

double moment_integral_J(const Distribution& d, double a, double b, double x0) {
  check_interval(d, a, b);
  if (a == b) return 0.0;
  // J = I + x0 * integral of (w - x0) p(w).
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian_I(g, a, b, x0) + x0 * gaussian_first_about(g, a, b, x0); },
                        [&](const Uniform& u) { return uniform_I(u, a, b, x0) + x0 * uniform_first_about(u, a, b, x0); },
                        [&](const StudentT&) {
                          return quadrature_value(d, a, b, [x0](double w) { return w * (w - x0); });
                        },
                    },
                    d.family());
}

std::optional<double> student_t_integral_I_closed(const Distribution& d, double a, double b, double x0) {
  check_interval(d, a, b);
  const auto* t = std::get_if<StudentT>(&d.family());
  if (t == nullptr) throw std::invalid_argument("student_t_integral_I_closed needs a Student's t distribution");
  const double nu = t->dof;
  const double k = (nu + 1.0) / 2.0;

  auto f0 = [&](double w) -> std::optional<double> {
    auto h = hyp2f1_nonpositive(0.5, k, 1.5, -w * w / nu);
    if (!h) return std::nullopt;
    return w * *h;
  };
  auto f2 = [&](double w) -> std::optional<double> {
    auto h = hyp2f1_nonpositive(1.5, k, 2.5, -w * w / nu);
    if (!h) return std::nullopt;
    return w * w * w / 3.0 * *h;
  };
  auto f1 = [&](double w) {
    const double u = w * w / nu;
    if (nu == 1.0) return 0.5 * std::log1p(u);
    return nu / (1.0 - nu) * std::expm1((1.0 - nu) / 2.0 * std::log1p(u));
  };

  const auto f0a = f0(a), f0b = f0(b), f2a = f2(a), f2b = f2(b);
  if (!f0a || !f0b || !f2a || !f2b) return std::nullopt;
  const double m0 = *f0b - *f0a;
  const double m1 = f1(b) - f1(a);
  const double m2 = *f2b - *f2a;
  return student_norm(nu) * (m2 - 2.0 * x0 * m1 + x0 * x0 * m0);
}

double rounding_error(const QuantGrid& grid, const Distribution& d) {
  double sum = 0.0;
  for_each_piece(grid, d, [&](double a, double b, double q, bool clipped) {
    if (!clipped) sum += moment_integral_I(d, a, b, q);
  });
  return sum;
}

double clipping_error(const QuantGrid& grid, const Distribution& d) {
  double sum = 0.0;
  if (d.clip_min() < grid.min()) {
    sum += moment_integral_I(d, d.clip_min(), std::min(grid.min(), d.clip_max()), grid.min());
  }
  if (grid.max() < d.clip_max()) {
    sum += moment_integral_I(d, std::max(grid.max(), d.clip_min()), d.clip_max(), grid.max());
  }
  return sum;
}

ErrorBreakdown expected_mse(const QuantGrid& grid, const Distribution& d) {
  return ErrorBreakdown{rounding_error(grid, d), clipping_error(grid, d)};
}

double second_moment(const Distribution& d) { return moment_integral_I(d, d.clip_min(), d.clip_max(), 0.0); }

double cross_error(const QuantGrid& grid, const Distribution& d) {
  // On each piece R(w) = q - w, so w R(w) = -w (w - q).
  double sum = 0.0;
  for_each_piece(grid, d, [&](double a, double b, double q, bool) { sum -= moment_integral_J(d, a, b, q); });
  return sum;
}

double scalar_product_mse(const QuantGrid& grid_w, const Distribution& w, const QuantGrid& grid_x,
                          const Distribution& x) {
  const double mw = second_moment(w);
  const double mx = second_moment(x);
  const double erw = expected_mse(grid_w, w).total();
  const double erx = expected_mse(grid_x, x).total();
  const double esw = cross_error(grid_w, w);
  const double esx = cross_error(grid_x, x);
  return mx * erw + mw * erx + erw * erx + 2.0 * esw * esx + 2.0 * erw * esx + 2.0 * erx * esw;
}

double scalar_product_mse_approx(const QuantGrid& grid_w, const Distribution& w,
                                 const QuantGrid& grid_x, const Distribution& x) {
  return expected_mse(grid_w, w).total() * second_moment(x) + expected_mse(grid_x, x).total() * second_moment(w);
}

double sqnr_db(double signal_power, double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal_power / mse);
}

double sqnr_db(const Distribution& d, const QuantGrid& grid) {
  return sqnr_db(second_moment(d), expected_mse(grid, d).total());
}

QuadratureResult quadrature_mse_oracle(const QuantGrid& grid, const Distribution& d, double abs_tol) {
  std::vector<std::pair<double, double>> pieces;
  for_each_piece(grid, d, [&](double a, double b, double, bool) { pieces.emplace_back(a, b); });
  const double piece_tol = abs_tol / static_cast<double>(std::max<std::size_t>(pieces.size(), 1));
  QuadratureResult total;
  for (const auto& [a, b] : pieces) {
    total += integrate_adaptive(
        [&](double w) {
          const double r = w - quantize_fp_oracle(w, grid);
          return r * r * d.pdf(w);
        },
        a, b, piece_tol, 1e-13);
  }
  total.converged = total.converged || total.error <= abs_tol;
  return total;
}

double minimize_clip(const std::function<double(double)>& objective, double lo, double hi) {
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("minimize_clip needs 0 < lo < hi");
  constexpr int kScan = 64;
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (kScan - 1);
  std::vector<double> cs(kScan);
  double best_c = lo;
  double best_f = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < kScan; ++i) {
    cs[i] = i == kScan - 1 ? hi : std::exp(log_lo + step * i);
    const double f = objective(cs[i]);
    if (f < best_f) {
      best_f = f;
      best_c = cs[i];
      best_i = i;
    }
  }
  auto consider = [&](double c, double f) {
    if (f < best_f || (f == best_f && c < best_c)) {
      best_f = f;
      best_c = c;
    }
  };

  double a = cs[std::max(best_i - 1, 0)];
  double b = cs[std::min(best_i + 1, kScan - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < 80 && (b - a) > 1e-9 * best_c; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
      consider(x2, f2);
    }
  }
  return best_c;
}

FpFormat optimal_fp_format(int mantissa_bits, int exponent_bits, const Distribution& d) {
  const double range = d.clip_abs_max();
  const double c = minimize_clip(
      [&](double clip) {
        return expected_mse(enumerate_grid(format_from_max(clip, mantissa_bits, exponent_bits)), d).total();
      },
      0.05 * range, 2.0 * range);
  return format_from_max(c, mantissa_bits, exponent_bits);
}

IntFormat int_format_from_max(int bit_width, double max_value) {
  const double top = static_cast<double>((std::int64_t{1} << (bit_width - 1)) - 1);
  return IntFormat::make(bit_width, max_value / top);
}

IntFormat optimal_int_format(int bit_width, const Distribution& d) {
  const double range = d.clip_abs_max();
  const double c = minimize_clip(
      [&](double clip) { return expected_mse(enumerate_int_grid(int_format_from_max(bit_width, clip)), d).total(); },
      0.05 * range, 2.0 * range);
  return int_format_from_max(bit_width, c);
}

}  // namespace fpq
