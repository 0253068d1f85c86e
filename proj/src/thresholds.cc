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

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

double SplitWeight(int64_t s, int64_t t) {
  const double sd = static_cast<double>(s);
  const double td = static_cast<double>(t);
  return sd * (td - sd) / td;
}

absl::Status CheckSplit(int64_t s, int64_t t) {
  if (s < 1 || s >= t) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 1 <= s < t, got s=", s, " t=", t));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ThresholdParams::Validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0, 1), got ", gamma));
  }
  if (!(alpha > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be positive, got ", alpha));
  }
  if (!(truncation_m > 0.0) || !(m0_bound >= 0.0) || !(sigma >= 0.0) ||
      !(c_lip >= 0.0)) {
    return absl::InvalidArgumentError(
        "M must be positive; M0, sigma and C_Lip non-negative");
  }
  if (!(c_min > 0.0) || !(bin_width > 0.0) || dim < 1) {
    return absl::InvalidArgumentError(
        "c_min and bin width must be positive, dimension >= 1");
  }
  return absl::OkStatus();
}

PrivateThreshold::PrivateThreshold(const ThresholdParams& params)
    : params_(params) {
  const double cube = std::pow(params.bin_width, params.dim);
  cell_mass_ = params.c_min * cube;
  activation_rate_ = cell_mass_ * cell_mass_ * params.alpha * params.alpha;
  const double gap = params.truncation_m - params.m0_bound;
  // sigma = 0 makes the truncation bias vanish by continuity.
  const double truncation_bias =
      params.sigma > 0.0
          ? 2.0 * gap * std::exp(-gap * gap / (2.0 * params.sigma * params.sigma))
          : 0.0;
  bias_ = truncation_bias +
          params.c_lip * std::sqrt(static_cast<double>(params.dim)) *
              params.bin_width;
  noise_coef_ = params.truncation_m / (cell_mass_ * params.alpha);
}

absl::StatusOr<PrivateThreshold> PrivateThreshold::Create(
    const ThresholdParams& params) {
  if (absl::Status st = params.Validate(); !st.ok()) return st;
  if (params.truncation_m < params.m0_bound) {
    return absl::InvalidArgumentError(absl::StrCat(
        "truncation level ", params.truncation_m,
        " is below the regression bound M0=", params.m0_bound));
  }
  return PrivateThreshold(params);
}

double PrivateThreshold::LogTerm(int64_t t) const {
  const double td = static_cast<double>(t);
  return std::log(72.0 * td * td * td / (params_.gamma * cell_mass_));
}

bool PrivateThreshold::Active(int64_t s, int64_t t) const {
  return SplitWeight(s, t) * activation_rate_ >= 64.0 * LogTerm(t);
}

double PrivateThreshold::operator()(int64_t s, int64_t t) const {
  const double log_term = LogTerm(t);
  const double weight = SplitWeight(s, t);
  if (weight * activation_rate_ < 64.0 * log_term) return kInfinity;
  return 2.0 * std::sqrt(weight) * bias_ + noise_coef_ * std::sqrt(log_term);
}

int64_t PrivateThreshold::FirstActiveTime() const {
  // max_s s(t-s)/t is attained at s = floor(t/2); scan t upward.
  for (int64_t t = 2;; t = t < 1024 ? t + 1 : t + t / 1024) {
    if (Active(t / 2, t)) {
      // Walk back to the exact first active time.
      int64_t lo = t;
      while (lo > 2 && Active((lo - 1) / 2, lo - 1)) --lo;
      return lo;
    }
  }
}

absl::StatusOr<NonprivateThreshold> NonprivateThreshold::Create(
    const ThresholdParams& params) {
  if (absl::Status st = params.Validate(); !st.ok()) return st;
  const double cube = std::pow(params.bin_width, params.dim);
  const double bias = params.c_lip * std::sqrt(static_cast<double>(params.dim)) *
                      params.bin_width;
  return NonprivateThreshold(bias, 4.0 * params.sigma / std::sqrt(params.c_min * cube),
                             params.gamma);
}

double NonprivateThreshold::operator()(int64_t s, int64_t t) const {
  const double td = static_cast<double>(t);
  return 2.0 * std::sqrt(SplitWeight(s, t)) * bias_ +
         noise_coef_ * std::sqrt(5.0 * std::log(td) + std::log(32.0 / gamma_));
}

absl::StatusOr<UnivariateThreshold> UnivariateThreshold::Create(
    double gamma, double sigma, double alpha, double interval_length) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0, 1), got ", gamma));
  }
  if (!(sigma >= 0.0) || !(alpha > 0.0) || !(interval_length > 0.0)) {
    return absl::InvalidArgumentError(
        "sigma must be non-negative; alpha and interval length positive");
  }
  const double scale = interval_length / alpha;
  return UnivariateThreshold(
      std::pow(2.0, 1.5) * std::sqrt(sigma * sigma + 4.0 * scale * scale), gamma);
}

double UnivariateThreshold::operator()(int64_t t) const {
  return coef_ * std::sqrt(std::log(static_cast<double>(t) / gamma_));
}

absl::StatusOr<double> ThresholdPrivate(int64_t s, int64_t t,
                                        const ThresholdParams& params) {
  if (absl::Status st = CheckSplit(s, t); !st.ok()) return st;
  absl::StatusOr<PrivateThreshold> schedule = PrivateThreshold::Create(params);
  if (!schedule.ok()) return schedule.status();
  return (*schedule)(s, t);
}

absl::StatusOr<double> ThresholdNonprivate(int64_t s, int64_t t,
                                           const ThresholdParams& params) {
  if (absl::Status st = CheckSplit(s, t); !st.ok()) return st;
  absl::StatusOr<NonprivateThreshold> schedule =
      NonprivateThreshold::Create(params);
  if (!schedule.ok()) return schedule.status();
  return (*schedule)(s, t);
}

absl::StatusOr<double> ThresholdUnivariate(int64_t t, double gamma,
                                           double sigma, double alpha) {
  if (t < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("univariate threshold needs t >= 2, got ", t));
  }
  absl::StatusOr<UnivariateThreshold> schedule =
      UnivariateThreshold::Create(gamma, sigma, alpha);
  if (!schedule.ok()) return schedule.status();
  return (*schedule)(t);
}

double M1TruncationFloor(double m0, double sigma, double h) {
  const double base = std::log(2.0 + sigma / h);
  return m0 + sigma * std::sqrt(2.0 * base + std::log(base));
}

absl::StatusOr<SnrResult> SnrCheck(DetectorKind kind, double kappa,
                                   double delta, const ThresholdParams& params,
                                   double c_snr) {
  if (!(kappa > 0.0) || !(delta > 0.0)) {
    return absl::InvalidArgumentError("kappa and Delta must be positive");
  }
  if (!(c_snr > 0.0)) {
    return absl::InvalidArgumentError("C_SNR must be positive");
  }
  if (absl::Status st = params.Validate(); !st.ok()) return st;
  const double cube = std::pow(params.bin_width, params.dim);
  const double k2 = kappa * kappa;
  const double s2 = params.sigma * params.sigma;
  double lhs = 0.0;
  double log_term = 0.0;
  switch (kind) {
    case DetectorKind::kPrivate:
      lhs = k2 * cube * cube * params.alpha * params.alpha * delta /
            std::max(s2, params.m0_bound * params.m0_bound);
      log_term = std::log(delta / (params.c_min * cube * cube * params.gamma));
      break;
    case DetectorKind::kNonprivate:
      lhs = k2 * cube * delta / s2;
      log_term = std::log(delta / (params.gamma * cube));
      break;
    case DetectorKind::kUnivariate:
      lhs = delta * k2 / (s2 + 4.0 / (params.alpha * params.alpha));
      log_term = std::log(delta / params.gamma);
      break;
  }
  const double rhs = c_snr * log_term;
  const double ratio = rhs > 0.0 ? lhs / rhs : kInfinity;
  return SnrResult{lhs >= rhs, ratio, lhs, log_term};
}


absl::StatusOr<double> DelayOrder(DetectorKind kind, double kappa, double delta,
                                  const ThresholdParams& params,
                                  double interval_length) {
  if (!(kappa > 0.0) || !(delta > 0.0)) {
    return absl::InvalidArgumentError("kappa and Delta must be positive");
  }
  if (absl::Status st = params.Validate(); !st.ok()) return st;
  const double cube = std::pow(params.bin_width, params.dim);
  const double k2 = kappa * kappa;
  const double a2 = params.alpha * params.alpha;
  switch (kind) {
    case DetectorKind::kPrivate:
      return params.truncation_m * params.truncation_m / (k2 * cube * cube * a2) *
             std::log(delta / (cube * cube * params.c_min * params.gamma));
    case DetectorKind::kNonprivate:
      return params.sigma * params.sigma / (k2 * cube) *
             std::log(delta / params.gamma);
    case DetectorKind::kUnivariate:
      return (params.sigma * params.sigma +
              4.0 * interval_length * interval_length / a2) *
             std::log(delta / params.gamma) / k2;
  }
  return absl::InternalError("unknown detector kind");
}

}  // namespace privcusum
