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

#include "fpq/formats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "support/oracles.hpp"

namespace fpq {
namespace {

std::vector<double> grid_values(const QuantGrid& g) { return {g.values().begin(), g.values().end()}; }

TEST(MaxRepresentable, Fp8E4M3WithBias8Is240) {
  EXPECT_EQ(max_representable(FpFormat::make(3, 4, 8.0)), 240.0);
}

TEST(MaxRepresentable, MatchesBruteForceExamples) {
  EXPECT_EQ(max_representable(FpFormat::make(2, 2, 2.0)), testing::brute_force_grid(2, 2, 2.0).back());
  EXPECT_EQ(max_representable(FpFormat::make(2, 2, 2.0)), 3.5);
  EXPECT_EQ(max_representable(FpFormat::make(2, 5, 16.0)), testing::brute_force_grid(2, 5, 16.0).back());
  EXPECT_EQ(max_representable(FpFormat::make(2, 5, 16.0)), 57344.0);
}

TEST(MinSubnormal, Examples) {
  EXPECT_EQ(min_subnormal(FpFormat::make(3, 4, 8.0)), std::ldexp(1.0, -10));
  EXPECT_EQ(min_subnormal(FpFormat::make(2, 2, 2.0)), 0.125);
  EXPECT_EQ(min_subnormal(FpFormat::make(0, 2, 1.0)), 1.0);
}

TEST(EnumerateGrid, E2M2Bias2ListsAllValues) {
  const std::vector<double> positive = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0,
                                        1.25,  1.5,  1.75,  2.0, 2.5,   3.0,  3.5};
  std::vector<double> expected;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) expected.push_back(-*it);
  expected.push_back(0.0);
  expected.insert(expected.end(), positive.begin(), positive.end());
  EXPECT_EQ(grid_values(enumerate_grid(FpFormat::make(2, 2, 2.0))), expected);
}

TEST(EnumerateGrid, EveryEightBitLayoutHas255Values) {
  for (int m = 0; m <= 6; ++m) {
    for (double bias : {-3.5, 0.0, 7.25, 8.0}) {
      EXPECT_EQ(enumerate_grid(FpFormat::make(m, 7 - m, bias)).size(), 255u) << m << " " << bias;
    }
  }
}

TEST(EnumerateGrid, MatchesBruteForceUpTo12Bits) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> bias_dist(-13.0, 13.0);
  for (int m = 0; m <= 9; ++m) {
    for (int e = 1; e <= 10 && m + e <= 11; ++e) {
      // Offsets from the standard bias keep the top binade of wide exponents finite.
      const double standard = std::ldexp(1.0, e - 1);
      for (double bias : {standard, standard + std::round(bias_dist(rng)), standard + bias_dist(rng)}) {
        const FpFormat f = FpFormat::make(m, e, bias);
        const auto expected = testing::brute_force_grid(m, e, bias);
        const auto got = grid_values(enumerate_grid(f));
        ASSERT_EQ(got.size(), expected.size()) << layout_name(m, e) << " b=" << bias;
        for (std::size_t i = 0; i < got.size(); ++i) {
          // Both sides round 2^-frac(bias) independently, so fractional biases can differ by a few ulps.
          ASSERT_NEAR(got[i], expected[i], 2e-15 * std::fabs(expected[i])) << layout_name(m, e) << " b=" << bias;
        }
        EXPECT_EQ(max_representable(f), got.back());
        EXPECT_EQ(min_subnormal(f), got[got.size() / 2 + 1]);
      }
    }
  }
}

TEST(EnumerateGrid, SortedSymmetricSingleZero) {
  const QuantGrid g = enumerate_grid(FpFormat::make(4, 3, 5.3));
  const auto v = g.values();
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i - 1], v[i]);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], -v[v.size() - 1 - i]);
  EXPECT_EQ(std::count(v.begin(), v.end(), 0.0), 1);
  ASSERT_TRUE(g.zero_index().has_value());
  EXPECT_FALSE(std::signbit(v[*g.zero_index()]));
}

TEST(EnumerateGrid, NormalBinadeSpacing) {
  const int m = 3;
  const FpFormat f = FpFormat::make(m, 4, 8.0);
  const auto v = grid_values(enumerate_grid(f));
  // Normal binades are [2^a, 2^(a+1)] for a from 1 - b to 2^e - 1 - b.
  for (int a = -7; a <= 7; ++a) {
    const double lo = std::ldexp(1.0, a);
    const double hi = std::ldexp(1.0, a + 1);
    std::vector<double> in;
    for (double x : v) {
      if (x >= lo && x <= hi) in.push_back(x);
    }
    ASSERT_GE(in.size(), 2u) << a;
    for (std::size_t i = 1; i < in.size(); ++i) EXPECT_EQ(in[i] - in[i - 1], std::ldexp(1.0, a - m)) << a;
  }
}

TEST(EnumerateGrid, RejectsWideFormats) {
  EXPECT_THROW(enumerate_grid(FpFormat::make(10, 8, 0.0)), FormatError);
}

TEST(EnumerateIntGrid, Examples) {
  EXPECT_EQ(grid_values(enumerate_int_grid(IntFormat::make(2, 1.0))), (std::vector<double>{-2, -1, 0, 1}));
  const QuantGrid g8 = enumerate_int_grid(IntFormat::make(8, 1.0));
  EXPECT_EQ(g8.size(), 256u);
  EXPECT_EQ(g8.min(), -128.0);
  EXPECT_EQ(g8.max(), 127.0);
  EXPECT_EQ(enumerate_int_grid(IntFormat::make(8, 0.5)).max(), 63.5);
}

TEST(BiasFromMax, Examples) {
  EXPECT_EQ(bias_from_max(240.0, 3, 4), 8.0);
  EXPECT_EQ(bias_from_max(3.5, 2, 2), 2.0);
}

TEST(BiasFromMax, RoundTripsWithMaxRepresentable) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> bias_dist(-30.0, 60.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = static_cast<int>(rng() % 8);
    const int e = 1 + static_cast<int>(rng() % 6);
    const double bias = bias_dist(rng);
    const FpFormat f = FpFormat::make(m, e, bias);
    const double back = bias_from_max(max_representable(f), m, e);
    EXPECT_NEAR(back, bias, 1e-12 * std::max(1.0, std::fabs(bias)));
  }
}

TEST(BiasFromMax, RejectsNonPositiveClip) {
  EXPECT_THROW(bias_from_max(0.0, 3, 4), FormatError);
  EXPECT_THROW(bias_from_max(-1.0, 3, 4), FormatError);
}

TEST(FpFormat, Validation) {
  EXPECT_THROW(FpFormat::make(3, 0, 8.0), FormatError);
  EXPECT_THROW(FpFormat::make(-1, 4, 8.0), FormatError);
  EXPECT_THROW(FpFormat::make(3, 4, std::nan("")), FormatError);
  EXPECT_THROW(IntFormat::make(1, 1.0), FormatError);
  EXPECT_THROW(IntFormat::make(8, 0.0), FormatError);
}

}  // namespace
}  // namespace fpq
