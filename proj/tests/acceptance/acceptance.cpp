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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fpq/analytic.hpp"
#include "fpq/formats.hpp"
#include "fpq/learn.hpp"
#include "fpq/quadrature.hpp"
#include "fpq/quantsim.hpp"
#include "support/gradient_oracle.hpp"
#include "support/oracles.hpp"

namespace {

using namespace fpq;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// --- 1 ---------------------------------------------------------------------

// Linear scan over the brute-force grid; exact ties go to the even magnitude
// code (distance in grid steps from 0).
double nearest_even_code(double x, const std::vector<double>& grid, std::size_t zero) {
  std::size_t best = 0;
  double best_d = std::fabs(x - grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = std::fabs(x - grid[i]);
    if (d < best_d) {
      best = i;
      best_d = d;
    } else if (d == best_d) {
      const std::size_t code = i > zero ? i - zero : zero - i;
      if (code % 2 == 0) best = i;
    }
  }
  return grid[best];
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0);
  long long mismatches = 0;
  long long checked = 0;
  for (int m : {5, 4, 3, 2}) {
    for (double bias : {4.0, 8.0, 16.0}) {
      const FpFormat f = FpFormat::make(m, 7 - m, bias);
      const FpQuantizer fast(f);
      const std::vector<double> grid = testing::brute_force_grid(m, 7 - m, bias);
      const std::size_t zero = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), 0.0) - grid.begin());
      const double c = grid.back();
      std::uniform_real_distribution<double> wide(-2.0 * c, 2.0 * c);
      std::uniform_real_distribution<double> log_mag(std::log2(grid[zero + 1]) - 2.0, std::log2(2.0 * c));
      std::vector<double> inputs;
      for (int i = 0; i < 500000; ++i) inputs.push_back(wide(rng));
      for (int i = 0; i < 500000; ++i) inputs.push_back((i % 2 ? -1.0 : 1.0) * std::exp2(log_mag(rng)));
      for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        inputs.insert(inputs.end(), {mid, std::nextafter(mid, -INFINITY), std::nextafter(mid, INFINITY)});
      }
      for (double x : inputs) {
        const double got = fast(x);
        const double want = nearest_even_code(x, grid, zero);
        if (got != want || std::signbit(got) != std::signbit(want)) ++mismatches;
      }
      checked += static_cast<long long>(inputs.size());
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt("%lld mismatches over %lld inputs in 12 configurations, %.1f s", mismatches, checked, secs)};
}

// --- 2 ---------------------------------------------------------------------

Outcome max_value_240() {
  const double c = max_representable(FpFormat::make(3, 4, 8.0));
  return {c == 240.0, fmt("c = %.17g", c)};
}

// --- 3, 4 ------------------------------------------------------------------

Outcome toy_experiment(const Tensor& samples) {
  const auto t0 = Clock::now();
  const LearnState init = LearnState::from_format(FpFormat::make(3, 4, 8.0));
  const Trajectory t = sgd_learn(samples, init, kDefaultLearningRateClip, kDefaultLearningRateMantissa, 500);
  const double secs = seconds_since(t0);
  const double c = t.final_state.clip;
  const int rm = t.final_state.rounded_mantissa();
  bool saw5 = false, saw6 = false;
  for (std::size_t i = t.points.size() >= 100 ? t.points.size() - 100 : 0; i < t.points.size(); ++i) {
    const int r = static_cast<int>(std::floor(t.points[i].mantissa + 0.5));
    saw5 = saw5 || r == 5;
    saw6 = saw6 || r == 6;
  }
  const bool pass = !t.diverged && c >= 4.0 && c <= 4.8 && (rm == 5 || rm == 6) && saw5 && saw6 && secs < 120.0;
  return {pass, fmt("final c = %.4f, m = %.4f (round %d), round(m) in last 100 iterations: %s%s, %.1f s", c,
                    t.final_state.mantissa, rm, saw5 ? "5 " : "", saw6 ? "6" : "", secs)};
}

Outcome line_search(const Tensor& samples) {
  const auto t0 = Clock::now();
  const LineSearchResult r = line_search_mse(samples);
  const double secs = seconds_since(t0);
  const bool pass = r.mantissa_bits == 5 && std::fabs(r.clip - 4.37) <= 0.05 * 4.37 && secs < 120.0;
  return {pass, fmt("m = %d, c = %.4f, mse = %.4g, %.1f s", r.mantissa_bits, r.clip, r.mse, secs)};
}

// --- 5 ---------------------------------------------------------------------

struct Candidate {
  std::string name;
  std::variant<FpFormat, IntFormat> format;
};

QuantGrid grid_of(const Candidate& c) {
  if (const auto* f = std::get_if<FpFormat>(&c.format)) return enumerate_grid(*f);
  return enumerate_int_grid(std::get<IntFormat>(c.format));
}

std::vector<Candidate> eight_bit_candidates(const Distribution& d, bool with_int) {
  std::vector<Candidate> r;
  if (with_int) r.push_back({"INT8", optimal_int_format(8, d)});
  for (int m = 1; m <= 6; ++m) r.push_back({layout_name(m, 7 - m), optimal_fp_format(m, 7 - m, d)});
  return r;
}

Outcome analytic_vs_monte_carlo() {
  const auto t0 = Clock::now();
  constexpr Eigen::Index kSamples = 10000000;
  struct Case {
    Distribution d;
    Eigen::ArrayXd x;
  };
  std::vector<Case> cases;
  cases.push_back({Distribution::gaussian(0.0, 1.0, -8.0, 8.0), testing::normal_samples(kSamples, 101)});
  cases.push_back({Distribution::uniform(-1.0, 1.0), testing::uniform_samples(kSamples, 102, -1.0, 1.0)});
  int failures = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [d, x] : cases) {
    for (const Candidate& cand : eight_bit_candidates(d, true)) {
      const double analytic = expected_mse(grid_of(cand), d).total();
      double sum = 0.0, sum_sq = 0.0;
      if (const auto* f = std::get_if<FpFormat>(&cand.format)) {
        const FpQuantizer q(*f);
        for (double v : x) {
          const double e = v >= d.clip_min() && v <= d.clip_max() ? (v - q(v)) * (v - q(v)) : 0.0;
          sum += e;
          sum_sq += e * e;
        }
      } else {
        const IntFormat& int_format = std::get<IntFormat>(cand.format);
        for (double v : x) {
          const double r = v - quantize_int(v, int_format);
          const double e = v >= d.clip_min() && v <= d.clip_max() ? r * r : 0.0;
          sum += e;
          sum_sq += e * e;
        }
      }
      const double n = static_cast<double>(x.size());
      const double mean = sum / n;
      const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
      const double z = std::fabs(mean - analytic) / se;
      if (z > 3.0) ++failures;
      if (z > worst) {
        worst = z;
        worst_name = d.family_name() + " " + cand.name;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 180.0,
          fmt("%d of 14 outside 3 SE, largest |z| = %.2f (%s), %.1f s", failures, worst, worst_name.c_str(), secs)};
}

// --- 6 ---------------------------------------------------------------------

struct Ranked {
  std::string best;
  int best_exponent = 0;
  bool oracle_agrees = true;
};

// Ranks candidates by closed-form expected MSE and checks that the quadrature
// oracle produces the same strict ordering.
Ranked rank(const Distribution& d, const std::vector<Candidate>& cands) {
  std::vector<double> closed, quad;
  for (const auto& c : cands) {
    const QuantGrid g = grid_of(c);
    closed.push_back(expected_mse(g, d).total());
    quad.push_back(quadrature_mse_oracle(g, d).value);
  }
  Ranked r;
  const auto best = static_cast<std::size_t>(std::min_element(closed.begin(), closed.end()) - closed.begin());
  r.best = cands[best].name;
  if (const auto* f = std::get_if<FpFormat>(&cands[best].format)) r.best_exponent = f->exponent_bits;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if ((closed[i] < closed[j]) != (quad[i] < quad[j])) r.oracle_agrees = false;
    }
  }
  return r;
}

Outcome format_orderings() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;

  const Distribution u = Distribution::uniform(-1.0, 1.0);
  const Ranked ru = rank(u, eight_bit_candidates(u, true));
  pass = pass && ru.best == "INT8" && ru.oracle_agrees;
  detail += "uniform -> " + ru.best;

  const Distribution g = Distribution::gaussian(0.0, 1.0);
  const Ranked rg = rank(g, eight_bit_candidates(g, false));
  pass = pass && rg.best == "5M2E" && rg.oracle_agrees;
  detail += ", gaussian -> " + rg.best + "; student e*:";

  int previous = 0;
  for (double nu : {10.0, 5.0, 2.0, 1.0}) {
    const Distribution t = Distribution::student_t(nu, -100.0, 100.0);
    const Ranked rt = rank(t, eight_bit_candidates(t, false));
    pass = pass && rt.best_exponent >= previous && rt.oracle_agrees;
    previous = rt.best_exponent;
    detail += fmt(" nu=%g:%d", nu, rt.best_exponent);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 120.0;
  detail += fmt(", quadrature ordering %s, %.1f s", pass ? "agrees" : "checked", secs);
  return {pass, detail};
}

// --- 7 ---------------------------------------------------------------------

Outcome outlier_trend() {
  bool pass = true;
  std::string detail = "e* by range:";
  int previous = 0;
  for (double range : {1.0, 10.0, 100.0, 1000.0}) {
    const Distribution d = Distribution::student_t(2.0, -range, range);
    int best_e = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= 6; ++m) {
      const double mse = expected_mse(enumerate_grid(format_from_max(range, m, 7 - m)), d).total();
      if (mse < best) {
        best = mse;
        best_e = 7 - m;
      }
    }
    pass = pass && best_e >= previous;
    previous = best_e;
    detail += fmt(" R=%g:%d", range, best_e);
  }
  return {pass, detail};
}

// --- 8 ---------------------------------------------------------------------

Outcome gradient_checks() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const testing::FdTriple t = testing::random_normal_triple(rng);
    LearnState s;
    s.clip = t.clip;
    s.mantissa = t.mantissa;
    const double fd = testing::fd_grad_c(t);
    const double g = grad_c(Eigen::ArrayXd::Constant(1, t.x), s)[0];
    worst = std::max(worst, std::fabs(g - fd) / std::fabs(fd));
  }

  long long wrong = 0;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double c : {0.01, 1.0, 4.37, 240.0, 57344.0}) {
    LearnState s;
    s.clip = c;
    std::vector<double> xs = {c, -c, std::nextafter(c, 0.0), std::nextafter(c, INFINITY), std::nextafter(-c, 0.0),
                              std::nextafter(-c, -INFINITY), 0.0, -0.0};
    for (int i = 0; i < 20000; ++i) xs.push_back(c * u(rng));
    const Eigen::ArrayXd x = Eigen::Map<const Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::ArrayXd g = grad_x(x, s);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double want = (-c <= x[i] && x[i] <= c) ? 1.0 : 0.0;
      if (g[i] != want) ++wrong;
    }
  }
  return {worst < 1e-3 && wrong == 0,
          fmt("grad_c worst relative error %.2e over 1000 triples; grad_x %lld indicator mismatches", worst, wrong)};
}

// --- 9 ---------------------------------------------------------------------

Outcome scalar_product_pair() {
  const auto t0 = Clock::now();
  const Distribution w = Distribution::gaussian(-1.0e-3, 1.7e-2, -0.35, 0.35);
  const Distribution x = Distribution::gaussian(0.06, 0.11, 0.0, 3.63);
  std::string best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (int mw = 1; mw <= 6; ++mw) {
    const QuantGrid gw = enumerate_grid(optimal_fp_format(mw, 7 - mw, w));
    for (int mx = 1; mx <= 6; ++mx) {
      const QuantGrid gx = enumerate_grid(optimal_fp_format(mx, 7 - mx, x));
      const double mse = scalar_product_mse(gw, w, gx, x);
      if (mse < best_mse) {
        best_mse = mse;
        best = layout_name(mw, 7 - mw) + "/" + layout_name(mx, 7 - mx);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {best == "5M2E/5M2E" && secs < 60.0, fmt("argmin %s (mse %.4g), %.2f s", best.c_str(), best_mse, secs)};
}

// --- 10 --------------------------------------------------------------------

Outcome closed_form_vs_quadrature() {
  struct Case {
    Distribution d;
    std::function<double(double)> pdf;
  };
  const std::vector<Case> cases = {
      {Distribution::gaussian(0.0, 1.0), [](double w) { return testing::gaussian_pdf(w, 0.0, 1.0); }},
      {Distribution::gaussian(0.06, 0.11, 0.0, 3.63), [](double w) { return testing::gaussian_pdf(w, 0.06, 0.11); }},
      {Distribution::uniform(-1.0, 1.0), [](double) { return 0.5; }},
      {Distribution::uniform(-0.35, 2.0), [](double) { return 1.0 / 2.35; }},
  };
  std::mt19937_64 rng(10);
  double worst = 0.0;
  int triples = 0;
  for (const auto& [d, pdf] : cases) {
    std::uniform_real_distribution<double> pos(d.clip_min(), d.clip_max());
    for (int i = 0; i < 5000; ++i, ++triples) {
      double a = pos(rng), b = pos(rng);
      if (a > b) std::swap(a, b);
      const double x0 = pos(rng);
      const double qi =
          integrate_adaptive([&](double w) { return (w - x0) * (w - x0) * pdf(w); }, a, b, 0.0, 1e-13).value;
      const double qj = integrate_adaptive([&](double w) { return w * (w - x0) * pdf(w); }, a, b, 0.0, 1e-13).value;
      worst = std::max(worst, std::fabs(moment_integral_I(d, a, b, x0) - qi) / std::fabs(qi));
      worst = std::max(worst, std::fabs(moment_integral_J(d, a, b, x0) - qj) / std::fabs(qj));
    }
  }
  return {worst < 1e-9, fmt("worst relative error %.2e over %d triples (I and J)", worst, triples)};
}

}  // namespace

int main() {
  const Tensor toy = Tensor::vector(testing::normal_samples(100000, 0));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"3M4E bias 8 max value", max_value_240},
      {"toy SGD experiment", [&] { return toy_experiment(toy); }},
      {"line search", [&] { return line_search(toy); }},
      {"analytic vs Monte-Carlo MSE", analytic_vs_monte_carlo},
      {"format orderings", format_orderings},
      {"outlier range trend", outlier_trend},
      {"gradient checks", gradient_checks},
      {"scalar-product format pair", scalar_product_pair},
      {"closed form vs quadrature", closed_form_vs_quadrature},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    const Outcome o = check();
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
