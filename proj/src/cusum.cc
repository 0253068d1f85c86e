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

#include "privcusum/cusum.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "privcusum/estimators.h"

namespace privcusum {
namespace {

absl::Status CheckSplit(const PrefixState& state, int64_t s, int64_t t) {
  if (s < 1 || s >= t) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 1 <= s < t, got s=", s, " t=", t));
  }
  if (t != state.time()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "statistic is defined at the current time ", state.time(), ", got t=", t));
  }
  if (!state.IsRetained(s)) {
    return absl::NotFoundError(absl::StrCat("split ", s, " is not retained"));
  }
  return absl::OkStatus();
}

}  // namespace

namespace internal {

double CusumPrivateUnchecked(const PrefixState& state, int64_t s, int64_t t) {
  const int64_t n = state.width() / 2;
  const auto head = state.Cumulative(s);
  const auto total = state.Cumulative(t);
  const double floor_a = MassFloor(s);
  const double floor_b = MassFloor(t - s);
  const double len_a = static_cast<double>(s);
  const double len_b = static_cast<double>(t - s);
  double best = 0.0;
  for (int64_t j = 0; j < n; ++j) {
    const double wa = head[j];
    const double za = head[n + j];
    const double wb = total[j] - wa;
    const double zb = total[n + j] - za;
    const double ma = wa / len_a >= floor_a ? za / wa : 0.0;
    const double mb = wb / len_b >= floor_b ? zb / wb : 0.0;
    best = std::max(best, std::abs(ma - mb));
  }
  return CusumWeight(s, t) * best;
}

double CusumNonprivateUnchecked(const PrefixState& state, int64_t s, int64_t t) {
  const int64_t n = state.width() / 2;
  const auto head = state.Cumulative(s);
  const auto total = state.Cumulative(t);
  double best = 0.0;
  for (int64_t j = 0; j < n; ++j) {
    const double ca = head[j];
    const double cb = total[j] - ca;
    // A bin unobserved on either side carries no evidence about a change.
    if (ca <= 0.0 || cb <= 0.0) continue;
    best = std::max(best,
                    std::abs(head[n + j] / ca - (total[n + j] - head[n + j]) / cb));
  }
  return CusumWeight(s, t) * best;
}

}  // namespace internal

absl::StatusOr<double> CusumPrivate(const PrefixState& state, int64_t s,
                                    int64_t t) {
  if (absl::Status st = CheckSplit(state, s, t); !st.ok()) return st;
  return internal::CusumPrivateUnchecked(state, s, t);
}

absl::StatusOr<double> CusumNonprivate(const PrefixState& state, int64_t s,
                                       int64_t t) {
  if (absl::Status st = CheckSplit(state, s, t); !st.ok()) return st;
  return internal::CusumNonprivateUnchecked(state, s, t);
}

absl::StatusOr<double> CusumUnivariate(std::span<const double> prefix,
                                       int64_t s, int64_t t) {
  if (s < 1 || s >= t) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 1 <= s < t, got s=", s, " t=", t));
  }
  if (t >= static_cast<int64_t>(prefix.size())) {
    return absl::OutOfRangeError(absl::StrCat(
        "t=", t, " exceeds prefix length ", prefix.size() - 1));
  }
  return internal::CusumUnivariateUnchecked(prefix[s], prefix[t], s, t);
}

PrivateRegressionEngine::PrivateRegressionEngine(int64_t num_bins,
                                                 Retention retention)
    : state_(2 * num_bins, retention), row_(2 * num_bins) {}

absl::Status PrivateRegressionEngine::Push(const Observation& obs) {
  const int64_t n = state_.width() / 2;
  if (obs.w.size() != n || obs.z.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "observation at time ", obs.time_index, " has ", obs.w.size(),
        " bins, detector expects ", n));
  }
  row_.head(n) = obs.w;
  row_.tail(n) = obs.z;
  return state_.Push(obs.time_index, row_);
}

NonprivateRegressionEngine::NonprivateRegressionEngine(BinPartition partition,
                                                       Retention retention)
    : partition_(std::move(partition)),
      state_(2 * partition_.num_bins(), retention),
      row_(2 * partition_.num_bins()) {}

absl::Status NonprivateRegressionEngine::Push(const Observation& obs) {
  absl::StatusOr<int64_t> bin = partition_.Locate(obs.x);
  if (!bin.ok()) {
    return absl::Status(bin.status().code(),
                        absl::StrCat("time ", obs.time_index, ": ",
                                     bin.status().message()));
  }
  const int64_t n = partition_.num_bins();
  row_.setZero();
  row_[*bin] = 1.0;
  row_[n + *bin] = obs.y;
  return state_.Push(obs.time_index, row_);
}

UnivariateEngine::UnivariateEngine(Retention retention) : state_(1, retention) {}

absl::Status UnivariateEngine::Push(const Observation& obs) {
  Eigen::Matrix<double, 1, 1> row;
  row[0] = obs.z;
  return state_.Push(obs.time_index, row);
}

}  // namespace privcusum
