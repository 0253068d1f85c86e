//
// Copyright 2026 The privcusum Authors.
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
//

#include "privcusum/thresholds.h"

#include <cmath>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace privcusum {
namespace {

using ::privcusum::testing::Unwrap;

// d=1, h=0.25, c_min=1, alpha=1, gamma=0.05, M=3, M0=1, sigma=1, C_Lip=1.
ThresholdParams Reference() {
  ThresholdParams p;
  p.gamma = 0.05;
  p.alpha = 1.0;
  p.truncation_m = 3.0;
  p.m0_bound = 1.0;
  p.sigma = 1.0;
  p.c_lip = 1.0;
  p.c_min = 1.0;
  p.bin_width = 0.25;
  p.dim = 1;
  return p;
}

void ExpectRelNear(double actual, double expected, double rel) {
  EXPECT_NEAR(actual, expected, rel * std::abs(expected)) << actual;
}

TEST(PrivateThresholdTest, ReferenceValues) {
  const ThresholdParams p = Reference();
  // At (5000, 10000) the activation condition fails: 156.25 < 64 log(...).
  EXPECT_EQ(Unwrap(ThresholdPrivate(5000, 10000, p)), kInfinity);
  ExpectRelNear(Unwrap(ThresholdPrivate(500000, 1000000, p)),
                876.283185650467270652, 1e-12);
  ExpectRelNear(Unwrap(ThresholdPrivate(2000000, 4000000, p)),
                1671.07927648475192533, 1e-12);
}

TEST(PrivateThresholdTest, InactiveForSmallTimes) {
  const PrivateThreshold schedule = Unwrap(PrivateThreshold::Create(Reference()));
  for (int64_t t = 2; t < 200; ++t) {
    for (int64_t s = 1; s < t; ++s) {
      ASSERT_FALSE(schedule.Active(s, t));
      ASSERT_EQ(schedule(s, t), kInfinity);
    }
  }
}

TEST(PrivateThresholdTest, BalancedSplitActivatesFirst) {
  ThresholdParams p = Reference();
  p.bin_width = 1.0;
  p.gamma = 0.5;
  const PrivateThreshold schedule = Unwrap(PrivateThreshold::Create(p));
  const int64_t first = schedule.FirstActiveTime();
  ASSERT_GT(first, 2);
  for (int64_t t = first - 50; t < first; ++t) {
    for (int64_t s = 1; s < t; ++s) ASSERT_FALSE(schedule.Active(s, t)) << s << "," << t;
  }
  EXPECT_TRUE(schedule.Active(first / 2, first));
  EXPECT_FALSE(schedule.Active(1, first));
  EXPECT_TRUE(std::isfinite(schedule(first / 2, first)));
}

TEST(PrivateThresholdTest, RejectsTruncationBelowBound) {
  ThresholdParams p = Reference();
  p.truncation_m = 0.5;
  EXPECT_EQ(PrivateThreshold::Create(p).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ThresholdPrivate(5, 5, Reference()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PrivateThresholdTest, ZeroSigmaDropsTruncationBias) {
  ThresholdParams p = Reference();
  p.sigma = 0.0;
  p.c_lip = 0.0;
  const double b = Unwrap(ThresholdPrivate(500000, 1000000, p));
  const double cube = 0.25;
  const double log_term = std::log(72.0 * 1e18 / (0.05 * cube));
  ExpectRelNear(b, 3.0 / cube * std::sqrt(log_term), 1e-13);
}

TEST(NonprivateThresholdTest, ReferenceValue) {
  ExpectRelNear(Unwrap(ThresholdNonprivate(50, 100, Reference())),
                45.9417819938688421757, 1e-12);
}

TEST(NonprivateThresholdTest, VanishesWithoutBiasOrNoise) {
  ThresholdParams p = Reference();
  p.c_lip = 0.0;
  p.sigma = 1e-300;
  EXPECT_LT(Unwrap(ThresholdNonprivate(50, 100, p)), 1e-290);
}

TEST(NonprivateThresholdTest, NoiseTermIsLinearInSigma) {
  ThresholdParams p = Reference();
  p.c_lip = 0.0;
  const double one = Unwrap(ThresholdNonprivate(30, 90, p));
  p.sigma = 2.0;
  EXPECT_NEAR(Unwrap(ThresholdNonprivate(30, 90, p)), 2.0 * one, 1e-12);
}

TEST(UnivariateThresholdTest, ReferenceValue) {
  ExpectRelNear(Unwrap(ThresholdUnivariate(2, 0.5, 0.0, 2.0)),
                3.33021844463079102542, 1e-14);
}

TEST(UnivariateThresholdTest, IncreasingInTime) {
  const UnivariateThreshold b = Unwrap(UnivariateThreshold::Create(0.05, 0.3, 0.7));
  for (int64_t t = 2; t < 1000; ++t) EXPECT_LT(b(t), b(t + 1));
  EXPECT_EQ(b(17), b(3, 17));
}

TEST(UnivariateThresholdTest, LargeAlphaApproachesNonprivateForm) {
  const double sigma = 0.8;
  const double expected = std::pow(2.0, 1.5) * sigma * std::sqrt(std::log(100 / 0.05));
  EXPECT_NEAR(Unwrap(ThresholdUnivariate(100, 0.05, sigma, 1e9)), expected, 1e-9);
}

TEST(UnivariateThresholdTest, IntervalLengthScalesPrivacyTerm) {
  const UnivariateThreshold unit = Unwrap(UnivariateThreshold::Create(0.1, 0.0, 1.0));
  const UnivariateThreshold wide = Unwrap(UnivariateThreshold::Create(0.1, 0.0, 1.0, 3.0));
  EXPECT_NEAR(wide(50), 3.0 * unit(50), 1e-12);
}

TEST(UnivariateThresholdTest, RejectsBadInput) {
  EXPECT_EQ(ThresholdUnivariate(1, 0.05, 1.0, 1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(ThresholdUnivariate(5, 1.0, 1.0, 1.0).ok());
  EXPECT_FALSE(ThresholdUnivariate(5, 0.05, 1.0, 0.0).ok());
}

TEST(ThresholdParamsTest, Validation) {
  ThresholdParams p = Reference();
  EXPECT_TRUE(p.Validate().ok());
  p.gamma = 0.0;
  EXPECT_FALSE(p.Validate().ok());
  p = Reference();
  p.c_min = 0.0;
  EXPECT_FALSE(p.Validate().ok());
  p = Reference();
  p.dim = 0;
  EXPECT_FALSE(p.Validate().ok());
}

TEST(M1TruncationFloorTest, ReferenceAndLimits) {
  ExpectRelNear(M1TruncationFloor(1.0, 1.0, 1.0), 2.51369495108919432471, 1e-14);
  EXPECT_NEAR(M1TruncationFloor(1.0, 1e-12, 1.0), 1.0, 1e-10);
  double previous = 0.0;
  for (double sigma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double m1 = M1TruncationFloor(1.0, sigma, 0.25);
    EXPECT_GT(m1, previous);
    previous = m1;
  }
}

TEST(SnrCheckTest, ReferenceExample) {
  ThresholdParams p = Reference();
  const SnrResult r = Unwrap(SnrCheck(DetectorKind::kPrivate, 1.0, 1e4, p, 1.0));
  EXPECT_TRUE(r.pass);
  ExpectRelNear(r.ratio, 41.7260250869167566330, 1e-12);
  EXPECT_DOUBLE_EQ(r.lhs, 625.0);
  EXPECT_FALSE(Unwrap(SnrCheck(DetectorKind::kPrivate, 1.0, 1.0, p, 1.0)).pass);
  p.alpha = 1e-6;
  const SnrResult tiny = Unwrap(SnrCheck(DetectorKind::kPrivate, 1.0, 1e4, p, 1.0));
  EXPECT_FALSE(tiny.pass);
  EXPECT_LT(tiny.ratio, 1e-9);
}

TEST(SnrCheckTest, NonprivateAndUnivariateForms) {
  const ThresholdParams p = Reference();
  const SnrResult np = Unwrap(SnrCheck(DetectorKind::kNonprivate, 0.5, 2000, p, 2.0));
  EXPECT_NEAR(np.lhs, 0.25 * 0.25 * 2000, 1e-12);
  EXPECT_NEAR(np.log_term, std::log(2000 / (0.05 * 0.25)), 1e-12);
  EXPECT_NEAR(np.ratio, np.lhs / (2.0 * np.log_term), 1e-12);
  const SnrResult uni = Unwrap(SnrCheck(DetectorKind::kUnivariate, 1.0, 200, p, 1.0));
  EXPECT_NEAR(uni.lhs, 200.0 / 5.0, 1e-12);
  EXPECT_NEAR(uni.log_term, std::log(200 / 0.05), 1e-12);
  EXPECT_FALSE(SnrCheck(DetectorKind::kUnivariate, 0.0, 200, p, 1.0).ok());
  EXPECT_FALSE(SnrCheck(DetectorKind::kUnivariate, 1.0, -1, p, 1.0).ok());
}

TEST(DelayOrderTest, MatchesRateFormulas) {
  ThresholdParams p = Reference();
  p.alpha = 0.5;
  EXPECT_NEAR(Unwrap(DelayOrder(DetectorKind::kUnivariate, 2.0, 400, p)),
              (1.0 + 16.0) * std::log(400 / 0.05) / 4.0, 1e-12);
  EXPECT_NEAR(Unwrap(DelayOrder(DetectorKind::kNonprivate, 2.0, 400, p)),
              1.0 / (4.0 * 0.25) * std::log(400 / 0.05), 1e-12);
  EXPECT_NEAR(Unwrap(DelayOrder(DetectorKind::kPrivate, 2.0, 400, p)),
              9.0 / (4.0 * 0.0625 * 0.25) * std::log(400 / (0.0625 * 0.05)), 1e-9);
}

}  // namespace
}  // namespace privcusum
