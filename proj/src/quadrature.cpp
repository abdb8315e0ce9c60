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

#include "fpq/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace fpq {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Tolerances {
  double rel;
  unsigned max_depth;
};

// Boost's own recursion only has a relative test against |value|, which never
// terminates on pieces whose integral cancels to ~0. Bisect here instead, with
// an absolute floor and the relative test taken against the L1 norm.
QuadratureResult recurse(const std::function<double(double)>& f, double a, double b, double abs_tol,
                         const Tolerances& tol, unsigned depth) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double error = 0.0;
  double l1 = 0.0;
  // Map to [-1, 1] ourselves so value, error and L1 share one scale.
  const double unit = Rule::integrate([&](double t) { return half * f(mid + half * t); }, -1.0, 1.0, 0, 0.0,
                                      &error, &l1);
  if (error <= std::max(abs_tol, tol.rel * l1)) return {unit, error, true};
  if (depth == tol.max_depth || !(a < mid && mid < b)) return {unit, error, false};
  QuadratureResult left = recurse(f, a, mid, 0.5 * abs_tol, tol, depth + 1);
  left += recurse(f, mid, b, 0.5 * abs_tol, tol, depth + 1);
  return left;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  if (a > b) {
    QuadratureResult r = integrate_adaptive(f, b, a, abs_tol, rel_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  return recurse(f, a, b, abs_tol, Tolerances{rel_tol, max_depth}, 0);
}

}  // namespace fpq
