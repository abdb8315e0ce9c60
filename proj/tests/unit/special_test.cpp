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

#include <gtest/gtest.h>

#include <cmath>

#include "fpq/quadrature.hpp"
#include "support/oracles.hpp"

namespace fpq {
namespace {

TEST(Hyp2f1, LogarithmIdentity) {
  for (double z : {-0.01, -0.5, -1.0, -3.0, -20.0}) {
    const auto v = hyp2f1_nonpositive(1.0, 1.0, 2.0, z);
    ASSERT_TRUE(v.has_value()) << z;
    EXPECT_NEAR(*v, -std::log1p(-z) / z, 1e-13 * std::fabs(*v)) << z;
  }
}

TEST(Hyp2f1, ArctangentIdentity) {
  for (double t : {0.1, 0.7, 1.0, 2.5, 6.0}) {
    const auto v = hyp2f1_nonpositive(0.5, 1.0, 1.5, -t * t);
    ASSERT_TRUE(v.has_value()) << t;
    EXPECT_NEAR(*v, std::atan(t) / t, 1e-13) << t;
  }
}

TEST(Hyp2f1, ZeroArgumentIsOne) { EXPECT_EQ(*hyp2f1_nonpositive(0.3, 2.0, 1.7, 0.0), 1.0); }

TEST(Hyp2f1, GivesUpFarOut) { EXPECT_FALSE(hyp2f1_nonpositive(0.5, 1.0, 1.5, -1e14, 1000).has_value()); }

TEST(NormalMass, AgreesWithSimpson) {
  const auto pdf = [](double w) { return testing::gaussian_pdf(w, 0.0, 1.0); };
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {0.0, 3.0}, {-8.0, -2.0}, {4.0, 6.0}}) {
    const double expected = testing::simpson(pdf, a, b);
    EXPECT_NEAR(normal_mass(a, b), expected, 1e-12 * expected + 1e-17) << a << " " << b;
  }
}

TEST(NormalMass, DeepTailKeepsRelativePrecision) {
  // Tail mass beyond 10 sigma, from the Mills-ratio asymptotic series.
  const double z = 10.0;
  const double series = testing::gaussian_pdf(z, 0.0, 1.0) / z * (1 - 1 / (z * z) + 3 / std::pow(z, 4) - 15 / std::pow(z, 6));
  EXPECT_NEAR(normal_mass(z, 40.0), series, 1e-4 * series);
  EXPECT_NEAR(normal_mass(-40.0, -z), series, 1e-4 * series);
}

TEST(IntegrateAdaptive, SineOverHalfPeriod) {
  const auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-13);
}

TEST(IntegrateAdaptive, CancellingIntegrandConverges) {
  const auto r = integrate_adaptive([](double x) { return x; }, -3.0, 3.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.0, 1e-13);
}

TEST(IntegrateAdaptive, ReversedLimitsNegate) {
  const auto fwd = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0);
  const auto rev = integrate_adaptive([](double x) { return std::exp(x); }, 1.0, 0.0);
  EXPECT_NEAR(fwd.value, std::exp(1.0) - 1.0, 1e-13);
  EXPECT_EQ(rev.value, -fwd.value);
}

TEST(IntegrateAdaptive, KinkedIntegrandErrorEstimateCoversActualError) {
  // The kink never lands on a bisection point, so the depth limit is reached.
  const auto r = integrate_adaptive([](double x) { return std::fabs(x - 0.3); }, -1.0, 1.0);
  const double exact = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
  EXPECT_NEAR(r.value, exact, 1e-12);
  EXPECT_LE(std::fabs(r.value - exact), r.error);
}

}  // namespace
}  // namespace fpq
