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

#include "fpq/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpq {

std::optional<double> hyp2f1_nonpositive(double a, double b, double c, double z, int max_terms) {
  if (z > 0.0) throw std::domain_error("hyp2f1_nonpositive: z must be <= 0");
  if (z == 0.0) return 1.0;
  const double zeta = z / (z - 1.0);
  const double b2 = c - b;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    term *= (a + n) * (b2 + n) / ((c + n) * (n + 1.0)) * zeta;
    sum += term;
    if (std::fabs(term) <= 1e-17 * std::fabs(sum)) {
      return std::pow(1.0 - z, -a) * sum;
    }
  }
  return std::nullopt;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_mass(double za, double zb) {
  constexpr double k = std::numbers::sqrt2 / 2.0;
  if (za >= 0.0) return 0.5 * (std::erfc(za * k) - std::erfc(zb * k));
  if (zb <= 0.0) return 0.5 * (std::erfc(-zb * k) - std::erfc(-za * k));
  return 0.5 * (std::erf(zb * k) - std::erf(za * k));
}

}  // namespace fpq
