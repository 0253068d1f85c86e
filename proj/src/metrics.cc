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

#include "privcusum/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privcusum {

double NearestRankQuantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const int64_t rank = std::clamp<int64_t>(
      static_cast<int64_t>(std::ceil(q * n - 1e-9)), 1,
      static_cast<int64_t>(values.size()));
  return values[rank - 1];
}

Summary Summarize(std::span<const RunOutcome> outcomes, double gamma,
                  std::optional<double> delay_budget) {
  Summary sum;
  int64_t false_alarms = 0;
  int64_t detections = 0;
  std::vector<double> delays;
  double detected_delay_total = 0.0;
  int64_t over_budget = 0;
  for (const RunOutcome& out : outcomes) {
    sum.horizon = std::max(sum.horizon, out.horizon);
    if (!out.status.ok()) {
      ++sum.errors;
      continue;
    }
    ++sum.runs;
    if (out.false_alarm) {
      ++false_alarms;
      continue;
    }
    if (out.delay.has_value()) {
      ++detections;
      const double d = static_cast<double>(*out.delay);
      delays.push_back(d);
      detected_delay_total += d;
      if (delay_budget.has_value() && d > *delay_budget) ++over_budget;
    } else {
      delays.push_back(std::numeric_limits<double>::infinity());
      ++over_budget;
    }
  }
  if (sum.runs == 0) return sum;
  const double n = static_cast<double>(sum.runs);
  const double p = static_cast<double>(false_alarms) / n;
  sum.false_alarm_rate = p;
  sum.false_alarm_se = std::sqrt(p * (1.0 - p) / n);
  sum.false_alarm_within_gamma = p <= gamma;
  sum.detection_rate = static_cast<double>(detections) / n;
  sum.delay_mean = detections > 0
                       ? detected_delay_total / static_cast<double>(detections)
                       : std::nan("");
  sum.delay_median = NearestRankQuantile(delays, 0.5);
  sum.delay_q10 = NearestRankQuantile(delays, 0.1);
  sum.delay_q90 = NearestRankQuantile(delays, 0.9);
  sum.over_budget_rate =
      delay_budget.has_value() && !delays.empty()
          ? static_cast<double>(over_budget) / static_cast<double>(delays.size())
          : std::nan("");
  return sum;
}

absl::StatusOr<ScalingFit> FitScaling(std::span<const double> x,
                                      std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    return absl::InvalidArgumentError(
        "scaling fit needs at least 3 paired points");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) ||
        !std::isfinite(y[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "scaling fit needs positive finite values, point ", i, " is (",
          x[i], ", ", y[i], ")"));
    }
    design(i, 0) = std::log(x[i]);
    design(i, 1) = 1.0;
    target[i] = std::log(y[i]);
  }
  const Eigen::Vector2d coef =
      design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd resid = design * coef - target;
  return ScalingFit{coef[0], coef[1],
                    std::sqrt(resid.squaredNorm() / static_cast<double>(n))};
}

absl::StatusOr<double> BernoulliSumTailBound(int64_t n, double p, double x) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError("p must lie in (0, 1)");
  }
  if (!(x > 0.0 && x <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("x must lie in (0, 1], got ", x));
  }
  return 2.0 * std::exp(-static_cast<double>(n) * p * x * x / 4.0);
}

}  // namespace privcusum
