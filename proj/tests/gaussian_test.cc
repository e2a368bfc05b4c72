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

#include "rdpdp/gaussian.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "rdpdp/optimizer.h"
#include "test_util.h"

namespace rdpdp {
namespace {

using ::rdpdp::testing::Sampler;
using ::testing::HasSubstr;

constexpr double kRhoFig2 = 1.0 / 800.0;
constexpr double kDelta = 1e-5;

TEST(GaussianConfigTest, RhoConventions) {
  ASSERT_OK_AND_ASSIGN(const GaussianConfig plain, GaussianConfig::Create(20));
  EXPECT_DOUBLE_EQ(plain.rho(), 0.00125);
  ASSERT_OK_AND_ASSIGN(const GaussianConfig sub,
                       GaussianConfig::Create(4, 1.0, 0.001));
  EXPECT_NEAR(sub.rho(), 6.2562562562562563e-08, 1e-22);
  EXPECT_THAT(GaussianConfig::Create(4, 2.0, 0.001).status().message(),
              HasSubstr("unit sensitivity"));
  EXPECT_FALSE(GaussianConfig::Create(0.0).ok());
  EXPECT_FALSE(GaussianConfig::Create(1.0, 1.0, 1.0).ok());
}

TEST(RhoTest, Values) {
  EXPECT_DOUBLE_EQ(*RhoGaussian(20.0), 0.00125);
  EXPECT_DOUBLE_EQ(*RhoGaussian(1.0), 0.5);
  EXPECT_DOUBLE_EQ(*RhoGaussian(3.0, 2.0), 4 * *RhoGaussian(3.0, 1.0));
  EXPECT_DOUBLE_EQ(*RhoSubsampled(4.0, 0.5), 0.03125);
  EXPECT_FALSE(RhoGaussian(-1.0).ok());
  EXPECT_FALSE(RhoSubsampled(4.0, 0.0).ok());
  double previous = INFINITY;
  for (double q = 0.5; q > 1e-8; q /= 3) {
    const double rho = *RhoSubsampled(4.0, q);
    EXPECT_LT(rho, previous);
    previous = rho;
  }
}

TEST(MaEpsilonTest, Values) {
  EXPECT_NEAR(*MaEpsilon(kRhoFig2, 1000, kDelta), 8.8371356469257318, 1e-12);
  // 0.125 + sqrt(0.5 log 1e5).
  EXPECT_NEAR(*MaEpsilon(kRhoFig2, 100, kDelta), 2.5242629560940406, 1e-12);
  EXPECT_NEAR(*MaEpsilon(0.01, 10, 1.0 - 1e-15), 0.1, 1e-6);
  EXPECT_FALSE(MaEpsilon(kRhoFig2, 0, kDelta).ok());
  EXPECT_FALSE(MaEpsilon(kRhoFig2, 10, 0.0).ok());
}

TEST(MaEpsilonTest, MatchesNumericMinimizationOverAlpha) {
  Sampler s(401);
  for (int i = 0; i < 100; ++i) {
    const double rho = s.LogUniform(1e-6, 1.0);
    const double t = static_cast<double>(s.Integer(1, 10000));
    const double delta = s.LogUniform(1e-12, 0.5);
    // Search u = log(alpha - 1).
    auto objective = [&](double u) {
      const double am1 = std::exp(u);
      return rho * (1 + am1) * t - std::log(delta) / am1;
    };
    ASSERT_OK_AND_ASSIGN(const ScalarMinimum m,
                         MinimizeUnimodal(objective, -30.0, 30.0));
    EXPECT_NEAR(*MaEpsilon(rho, t, delta), m.value, 1e-6 * (1 + m.value));
  }
}

TEST(CompositionTest, FigureTwoPoint) {
  ASSERT_OK_AND_ASSIGN(const CompositionEpsilon c,
                       CompositionEpsilonFor(kRhoFig2, 1000, kDelta));
  const double ma = *MaEpsilon(kRhoFig2, 1000, kDelta);
  EXPECT_GE(ma - c.epsilon, 0.5);
  EXPECT_LE(ma - c.epsilon, 0.8);
  EXPECT_EQ(c.epsilon, std::min({c.eps0, c.eps1, c.eps_third}));
  EXPECT_GT(c.argmin_alpha, 1.0);
  EXPECT_LE(c.argmin_alpha, 1.0 / kDelta);
}

TEST(CompositionTest, TinyRhoGoesToZero) {
  ASSERT_OK_AND_ASSIGN(const CompositionEpsilon c,
                       CompositionEpsilonFor(1e-14, 1, 0.5));
  EXPECT_LT(c.epsilon, 1e-6);
}

TEST(CompositionTest, BelowMaAtHundredSteps) {
  ASSERT_OK_AND_ASSIGN(const CompositionEpsilon c,
                       CompositionEpsilonFor(kRhoFig2, 100, kDelta));
  EXPECT_LE(c.epsilon, *MaEpsilon(kRhoFig2, 100, kDelta));
}

TEST(CompositionTest, HugeRhoTStaysFinite) {
  ASSERT_OK_AND_ASSIGN(const CompositionEpsilon c,
                       CompositionEpsilonFor(10.0, 1e5, 1e-10));
  EXPECT_TRUE(std::isfinite(c.epsilon));
  EXPECT_TRUE(std::isfinite(c.eps1));
}

TEST(CompositionTest, MonotoneInTRhoAndDelta) {
  double previous = 0.0;
  for (int t = 1; t <= 2000; t += 37) {
    const double e = CompositionEpsilonFor(kRhoFig2, t, kDelta)->epsilon;
    EXPECT_GE(e, previous - 1e-9) << t;
    previous = e;
  }
  previous = 0.0;
  for (double rho = 1e-6; rho < 1.0; rho *= 1.5) {
    const double e = CompositionEpsilonFor(rho, 50, kDelta)->epsilon;
    EXPECT_GE(e, previous - 1e-9) << rho;
    previous = e;
  }
  previous = INFINITY;
  for (double delta = 1e-12; delta < 0.5; delta *= 2) {
    const double e = CompositionEpsilonFor(kRhoFig2, 500, delta)->epsilon;
    EXPECT_LE(e, previous + 1e-9) << delta;
    previous = e;
  }
}

TEST(CompositionTest, ExactModeBelowClosedForm) {
  for (double t : {1.0, 30.0, 1000.0}) {
    for (double rho : {kRhoFig2, 6.2562562562562563e-08, 0.05}) {
      ASSERT_OK_AND_ASSIGN(
          const CompositionEpsilon exact,
          CompositionEpsilonFor(rho, t, kDelta, AccountingMode::kExact));
      ASSERT_OK_AND_ASSIGN(const CompositionEpsilon closed,
                           CompositionEpsilonFor(rho, t, kDelta));
      EXPECT_LE(exact.epsilon, closed.epsilon + 1e-7) << t << " " << rho;
      EXPECT_EQ(exact.branch, exact.epsilon == exact.eps_third
                                  ? CompositionBranch::kAlphaInvDelta
                                  : CompositionBranch::kExact);
    }
  }
}

TEST(CompositionTest, DominatesMaOnFigureSweeps) {
  for (int t = 1; t <= 1000; ++t) {
    EXPECT_LE(CompositionEpsilonFor(kRhoFig2, t, kDelta)->epsilon,
              *MaEpsilon(kRhoFig2, t, kDelta))
        << t;
  }
  const double rho3 = *RhoSubsampled(4.0, 0.001);
  for (int t = 1000; t <= 400000; t += 1000) {
    EXPECT_LE(CompositionEpsilonFor(rho3, t, kDelta)->epsilon,
              *MaEpsilon(rho3, t, kDelta))
        << t;
  }
}

TEST(MaxIterationsTest, GaloisPair) {
  for (double eps : {0.5, 1.0, 3.0, 6.0, 8.0}) {
    ASSERT_OK_AND_ASSIGN(const int64_t t, MaxIterations(kRhoFig2, eps, kDelta));
    ASSERT_GE(t, 1);
    EXPECT_LE(CompositionEpsilonFor(kRhoFig2, t, kDelta)->epsilon, eps);
    EXPECT_GT(CompositionEpsilonFor(kRhoFig2, t + 1, kDelta)->epsilon, eps);
    ASSERT_OK_AND_ASSIGN(const int64_t ma, MaMaxIterations(kRhoFig2, eps, kDelta));
    EXPECT_LE(*MaEpsilon(kRhoFig2, ma, kDelta), eps);
    EXPECT_GT(*MaEpsilon(kRhoFig2, ma + 1, kDelta), eps);
  }
}

TEST(MaxIterationsTest, AdvantageAtSix) {
  ASSERT_OK_AND_ASSIGN(const int64_t ours, MaxIterations(kRhoFig2, 6.0, kDelta));
  ASSERT_OK_AND_ASSIGN(const int64_t ma, MaMaxIterations(kRhoFig2, 6.0, kDelta));
  EXPECT_GE(ours - ma, 100);
}

TEST(MaxIterationsTest, TinyBudgetGivesZero) {
  EXPECT_EQ(*MaxIterations(kRhoFig2, 1e-4, kDelta), 0);
  EXPECT_EQ(*MaMaxIterations(kRhoFig2, 1e-4, kDelta), 0);
}

TEST(MaxIterationsTest, NondecreasingInBudget) {
  int64_t previous = 0;
  for (double eps = 0.1; eps < 10; eps += 0.3) {
    const int64_t t = *MaxIterations(kRhoFig2, eps, kDelta);
    EXPECT_GE(t, previous);
    previous = t;
  }
}

TEST(MaRequiredVarianceTest, DirectEvaluation) {
  // X = 0.0208199383395354611..., sigma^2 = 1 / (2 X).
  EXPECT_NEAR(*MaRequiredVariance(1, 1.0, kDelta), 24.015440960770689, 1e-9);
  EXPECT_NEAR(*MaRequiredVariance(2, 1.0, kDelta),
              2 * *MaRequiredVariance(1, 1.0, kDelta), 1e-9);
}

TEST(MaRequiredVarianceTest, SelfConsistent) {
  Sampler s(402);
  for (int i = 0; i < 100; ++i) {
    const double t = static_cast<double>(s.Integer(1, 5000));
    const double eps = s.Uniform(0.05, 10.0);
    const double delta = s.LogUniform(1e-12, 0.1);
    ASSERT_OK_AND_ASSIGN(const double var, MaRequiredVariance(t, eps, delta));
    EXPECT_LE(*MaEpsilon(1 / (2 * var), t, delta), eps + 1e-6);
    EXPECT_NEAR(*MaEpsilon(1 / (2 * var), t, delta), eps, 1e-8 * eps);
  }
}

TEST(RequiredVarianceTest, PreconditionNamesThreshold) {
  auto r = RequiredVarianceFor(100, 0.1, 0.4);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(r.status().message(), HasSubstr("2 delta log(1/delta)"));
}

TEST(RequiredVarianceTest, DominatesMaAndFeedsBack) {
  for (double delta : {1e-4, 1e-6, 1e-8}) {
    ASSERT_OK_AND_ASSIGN(const RequiredVariance ours,
                         RequiredVarianceFor(100, 1.0, delta));
    ASSERT_OK_AND_ASSIGN(const double ma, MaRequiredVariance(100, 1.0, delta));
    EXPECT_LE(ours.variance, ma) << delta;
    ASSERT_OK_AND_ASSIGN(
        const CompositionEpsilon back,
        CompositionEpsilonFor(1 / (2 * ours.variance), 100, delta));
    EXPECT_LE(back.epsilon, 1.0 + 1e-6) << delta;
    // The eps0 term reproduces the target: the variance is its inverse.
    EXPECT_NEAR(back.eps0, 1.0, 1e-6) << delta;
    ASSERT_TRUE(ours.plug_in_variance.has_value());
    EXPECT_GE(*ours.plug_in_variance, ours.variance);
    EXPECT_NEAR(ours.alpha_star, 2 * std::log(1 / delta), 1e-12);
  }
}

TEST(RequiredVarianceTest, LinearInT) {
  const double v1 = RequiredVarianceFor(100, 1.0, 1e-6)->variance;
  const double v2 = RequiredVarianceFor(200, 1.0, 1e-6)->variance;
  EXPECT_NEAR(v2, 2 * v1, 1e-9 * v2);
}

TEST(PrivacyCurveTest, RowsInOrderAndSingleRowMatches) {
  ASSERT_OK_AND_ASSIGN(const GaussianConfig g,
                       GaussianConfig::Create(4.0, 1.0, 0.001));
  const std::vector<int64_t> ts = {5000, 1, 300};
  ASSERT_OK_AND_ASSIGN(const std::vector<CurveRow> rows,
                       PrivacyCurve(g, kDelta, ts, /*include_exact=*/true));
  ASSERT_EQ(rows.size(), 3u);
  for (size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(rows[i].iterations, ts[i]);
    EXPECT_NEAR(*rows[i].epochs, 0.001 * ts[i], 1e-12);
    EXPECT_DOUBLE_EQ(rows[i].eps_ma, *MaEpsilon(g.rho(), ts[i], kDelta));
    EXPECT_DOUBLE_EQ(rows[i].eps_ours,
                     CompositionEpsilonFor(g.rho(), ts[i], kDelta)->epsilon);
    EXPECT_DOUBLE_EQ(rows[i].gap, rows[i].eps_ma - rows[i].eps_ours);
    ASSERT_TRUE(rows[i].eps_ours_exact.has_value());
    EXPECT_LE(*rows[i].eps_ours_exact, rows[i].eps_ours + 1e-7);
  }
  EXPECT_FALSE(PrivacyCurve(g, kDelta, {}).ok());
}

}  // namespace
}  // namespace rdpdp
