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

namespace fpq {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool converged = true;

  QuadratureResult& operator+=(const QuadratureResult& other) {
    value += other.value;
    error += other.error;
    converged = converged && other.converged;
    return *this;
  }
};

/// Adaptive Gauss-Kronrod (15/31) integration of f over [a, b]. Bisects until
/// the estimated error is below max(abs_tol, rel_tol * integral of |f|); `converged`
/// is false if the depth limit was hit first.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-14, double rel_tol = 1e-13,
                                    unsigned max_depth = 30);

}  // namespace fpq
