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

#ifndef PRIVCUSUM_METRICS_H_
#define PRIVCUSUM_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privcusum/pipeline.h"

namespace privcusum {

struct Summary {
  int64_t runs = 0;
  int64_t errors = 0;
  int64_t horizon = 0;
  // Alarms at or before the change time (any alarm for a null stream),
  // within the horizon.
  double false_alarm_rate = 0.0;
  double false_alarm_se = 0.0;
  bool false_alarm_within_gamma = true;
  // Alarms after the change time, within the horizon.
  double detection_rate = 0.0;
  // Over runs without a false alarm; a missed detection counts as an
  // infinite delay in the quantiles and is excluded from the mean.
  double delay_mean = 0.0;
  double delay_median = 0.0;
  double delay_q10 = 0.0;
  double delay_q90 = 0.0;
  // Share of non-false-alarm runs whose delay exceeds the budget or that
  // missed the change. NaN without a budget.
  double over_budget_rate = 0.0;
};

Summary Summarize(std::span<const RunOutcome> outcomes, double gamma,
                  std::optional<double> delay_budget = std::nullopt);

// Nearest-rank quantile (smallest value with at least q of the mass at or
// below it). Values may include +infinity.
double NearestRankQuantile(std::vector<double> values, double q);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual in log space
};

// Least squares of log(y) on log(x). Needs >= 3 points, all positive.
absl::StatusOr<ScalingFit> FitScaling(std::span<const double> x,
                                      std::span<const double> y);

// 2 exp(-n p x^2 / 4): bound on P(|sum eps_i B_i| >= x sum B_i) for
// Bernoulli(p) B_i and conditionally 1-sub-Gaussian eps_i; x in (0, 1].
absl::StatusOr<double> BernoulliSumTailBound(int64_t n, double p, double x);

}  // namespace privcusum

#endif  // PRIVCUSUM_METRICS_H_
