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

// Independent reference computations shared by the test binaries. Nothing here
// calls into the library.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace fpq::testing {

/// All values of the sign/exponent/mantissa encoding, straight from the
/// definition: exponent field p = 0 gives 2^(1-b) * k / 2^m, otherwise
/// 2^(p-b) * (1 + k / 2^m).
inline std::vector<double> brute_force_grid(int m, int e, double bias) {
  std::set<double> values;
  for (int p = 0; p < (1 << e); ++p) {
    for (int k = 0; k < (1 << m); ++k) {
      const double frac = static_cast<double>(k) / std::pow(2.0, m);
      // 2^-bias once, then exact power-of-two shifts, so large p stays ulp-accurate.
      const double unit = std::pow(2.0, -bias);
      const double v = p == 0 ? std::ldexp(unit, 1) * frac : std::ldexp(unit, p) * (1.0 + frac);
      values.insert(v);
      values.insert(-v);
    }
  }
  return {values.begin(), values.end()};
}

/// Linear-scan nearest value; exact ties resolved by `tie(lower, upper)`.
inline double nearest_by_scan(double x, const std::vector<double>& grid,
                              const std::function<double(double, double)>& tie) {
  double best = grid.front();
  double best_d = std::fabs(x - best);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = std::fabs(x - grid[i]);
    if (d < best_d) {
      best = grid[i];
      best_d = d;
    } else if (d == best_d) {
      best = tie(best, grid[i]);
    }
  }
  return best;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (a == b) return 0.0;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * i);
  return sum * h / 3.0;
}

inline double gaussian_pdf(double w, double mu, double sigma) {
  const double z = (w - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

inline double student_pdf(double w, double nu) {
  return std::tgamma((nu + 1) / 2) / (std::sqrt(nu * M_PI) * std::tgamma(nu / 2)) *
         std::pow(1 + w * w / nu, -(nu + 1) / 2);
}

inline Eigen::ArrayXd normal_samples(Eigen::Index n, std::uint64_t seed, double mu = 0.0, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mu, sigma);
  Eigen::ArrayXd x(n);
  for (auto& v : x) v = dist(rng);
  return x;
}

inline Eigen::ArrayXd uniform_samples(Eigen::Index n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::ArrayXd x(n);
  for (auto& v : x) v = dist(rng);
  return x;
}

/// Mean and standard error of the mean.
struct SampleMean {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline SampleMean sample_mean(const Eigen::ArrayXd& v) {
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const double var = (v - mean).square().sum() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace fpq::testing
