// Copyright 2026 The rdpdp Authors.
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

#include "rdpdp/optimizer.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "rdpdp/conversion.h"
#include "test_util.h"

namespace rdpdp {
namespace {

using ::rdpdp::testing::Sampler;
using ::testing::HasSubstr;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(MinimizeUnimodalTest, Quadratic) {
  ASSERT_OK_AND_ASSIGN(const ScalarMinimum m,
                       MinimizeUnimodal([](double x) { return (x - 2) * (x - 2); },
                                        0.0, 5.0));
  EXPECT_NEAR(m.argmin, 2.0, 1e-10);
  EXPECT_NEAR(m.value, 0.0, 1e-18);
}

TEST(MinimizeUnimodalTest, XPlusInverse) {
  ASSERT_OK_AND_ASSIGN(const ScalarMinimum m,
                       MinimizeUnimodal([](double x) { return x + 1 / x; },
                                        0.01, 10.0));
  EXPECT_NEAR(m.argmin, 1.0, 1e-7);
  EXPECT_NEAR(m.value, 2.0, 1e-14);
}

TEST(MinimizeUnimodalTest, BoundaryObjectiveMatchesDenseScan) {
  auto objective = [](double p) {
    return *BoundaryLogObjective(p, 2.0, 1.0, 0.1);
  };
  ASSERT_OK_AND_ASSIGN(const ScalarMinimum m,
                       MinimizeUnimodal(objective, 0.1, 1.0));
  double best = kInf;
  const int n = 1000000;
  for (int i = 1; i < n; ++i) {
    best = std::min(best, objective(0.1 + 0.9 * i / n));
  }
  EXPECT_LE(m.value, best + 1e-12);
  EXPECT_NEAR(m.value, best, 1e-6);
}

TEST(MinimizeUnimodalTest, InfiniteEndpointsAreSkipped) {
  ASSERT_OK_AND_ASSIGN(
      const ScalarMinimum m,
      MinimizeUnimodal([](double x) { return -std::log(x) - std::log(1 - x); },
                       0.0, 1.0));
  EXPECT_NEAR(m.argmin, 0.5, 1e-9);
}

TEST(MinimizeUnimodalTest, NowhereFiniteIsInfeasible) {
  auto r = MinimizeUnimodal([](double) { return kInf; }, 0.0, 1.0);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(MinimizeUnimodalTest, RejectsBadInterval) {
  EXPECT_FALSE(MinimizeUnimodal([](double x) { return x; }, 1.0, 1.0).ok());
  EXPECT_FALSE(MinimizeUnimodal([](double x) { return x; }, 2.0, 1.0).ok());
  ScalarSearchConfig cfg;
  cfg.abs_tol = 0.0;
  EXPECT_FALSE(MinimizeUnimodal([](double x) { return x; }, 0.0, 1.0, cfg).ok());
}

TEST(MinimizeUnimodalTest, NeverWorseThanBestCoarseSample) {
  // A bimodal objective: the coarse scan must keep the deeper well.
  Sampler s(201);
  for (int trial = 0; trial < 200; ++trial) {
    const double c1 = s.Uniform(0.1, 0.4), c2 = s.Uniform(0.6, 0.9);
    const double d1 = s.Uniform(0, 1), d2 = s.Uniform(0, 1);
    auto f = [&](double x) {
      return std::min(100 * (x - c1) * (x - c1) - d1,
                      100 * (x - c2) * (x - c2) - d2);
    };
    ScalarSearchConfig cfg;
    ASSERT_OK_AND_ASSIGN(const ScalarMinimum m, MinimizeUnimodal(f, 0.0, 1.0, cfg));
    const double eta = 1e-12;
    double best = kInf;
    for (int i = 0; i < cfg.coarse_grid; ++i) {
      best = std::min(best, f(eta + (1 - 2 * eta) * i / (cfg.coarse_grid - 1)));
    }
    EXPECT_LE(m.value, best);
    EXPECT_NEAR(m.value, std::min(-d1, -d2), 1e-9);
  }
}

TEST(InvertMonotoneTest, Exp) {
  ASSERT_OK_AND_ASSIGN(
      const double x,
      InvertMonotone([](double x) { return std::exp(x); }, 1.0, -5.0, 5.0,
                     Monotonicity::kIncreasing));
  EXPECT_NEAR(x, 0.0, 1e-10);
}

TEST(InvertMonotoneTest, Cube) {
  ASSERT_OK_AND_ASSIGN(
      const double x,
      InvertMonotone([](double x) { return x * x * x; }, 8.0, 0.0, 10.0,
                     Monotonicity::kIncreasing));
  EXPECT_NEAR(x, 2.0, 1e-10);
}

TEST(InvertMonotoneTest, Decreasing) {
  ASSERT_OK_AND_ASSIGN(
      const double x,
      InvertMonotone([](double x) { return 1 / x; }, 0.25, 1.0, 10.0,
                     Monotonicity::kDecreasing));
  EXPECT_NEAR(x, 4.0, 1e-9);
}

TEST(InvertMonotoneTest, BoundaryRoundTrip) {
  auto gamma = [](double d) { return GammaExact(2.0, 1.0, d)->value; };
  ASSERT_OK_AND_ASSIGN(const double d,
                       InvertMonotone(gamma, 0.3, 0.0, 0.9,
                                      Monotonicity::kIncreasing));
  EXPECT_NEAR(gamma(d), 0.3, 1e-8);
}

TEST(InvertMonotoneTest, OutOfRangeReportsEndpoints) {
  auto r = InvertMonotone([](double x) { return x; }, 20.0, 0.0, 10.0,
                          Monotonicity::kIncreasing);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_THAT(r.status().message(), HasSubstr("10"));
  EXPECT_THAT(r.status().message(), HasSubstr("0"));
}

TEST(InvertMonotoneTest, FlatStretchGivesLeftmostCrossing) {
  auto f = [](double x) { return std::min(x, 1.0); };
  ASSERT_OK_AND_ASSIGN(const double x,
                       InvertMonotone(f, 1.0, 0.0, 3.0,
                                      Monotonicity::kIncreasing));
  EXPECT_NEAR(x, 1.0, 1e-9);
}

TEST(InvertMonotoneTest, RoundTripOnRandomMonotoneFunctions) {
  Sampler s(202);
  for (int trial = 0; trial < 300; ++trial) {
    const double a = s.Uniform(0.1, 3), b = s.Uniform(-1, 1);
    auto f = [&](double x) { return a * x + b * std::tanh(x) + x * x * x; };
    const double target = s.Uniform(f(-2.0), f(2.0));
    ASSERT_OK_AND_ASSIGN(const double x,
                         InvertMonotone(f, target, -2.0, 2.0,
                                        Monotonicity::kIncreasing));
    // Slope is at most a + |b| + 12 on [-2, 2].
    EXPECT_NEAR(f(x), target, 1e-10 * (a + std::abs(b) + 12) + 1e-12);
  }
}

TEST(LogAddTest, Values) {
  EXPECT_EQ(LogAdd(-kInf, 3.5), 3.5);
  EXPECT_EQ(LogAdd(3.5, -kInf), 3.5);
  EXPECT_EQ(LogAdd(-kInf, -kInf), -kInf);
  EXPECT_NEAR(LogAdd(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
  // 710 + log 2 to 50 digits: 710.693147180559945309417232121458...
  EXPECT_DOUBLE_EQ(LogAdd(710.0, 710.0), 710.69314718055994530941723);
}

TEST(LogExpm1Test, Values) {
  EXPECT_EQ(LogExpm1(0.0), -kInf);
  EXPECT_NEAR(LogExpm1(1.0), std::log(std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(LogExpm1(1e-10), std::log(1e-10), 1e-9);
  EXPECT_DOUBLE_EQ(LogExpm1(1000.0), 1000.0);
}

}  // namespace
}  // namespace rdpdp
