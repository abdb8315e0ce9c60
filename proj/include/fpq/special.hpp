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

#include <optional>

namespace fpq {

/// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.
///
/// Uses the Pfaff transformation 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
/// so the series argument lies in [0, 1). Returns nullopt when the series has
/// not converged to relative 1e-16 within `max_terms`, which happens as z -> -inf.
std::optional<double> hyp2f1_nonpositive(double a, double b, double c, double z, int max_terms = 200000);

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal mass on [za, zb], evaluated in whichever tail keeps precision.
double normal_mass(double za, double zb);

}  // namespace fpq
