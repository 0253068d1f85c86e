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

#ifndef PRIVCUSUM_CUSUM_H_
#define PRIVCUSUM_CUSUM_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privcusum/partition.h"
#include "privcusum/prefix_state.h"
#include "privcusum/privacy.h"

namespace privcusum {

// sqrt(s (t - s) / t)
inline double CusumWeight(int64_t s, int64_t t) {
  const double sd = static_cast<double>(s);
  const double td = static_cast<double>(t);
  return std::sqrt(sd * (td - sd) / td);
}

// max_j sqrt(s(t-s)/t) |m_{1:s}(x_j) - m_{s+1:t}(x_j)| with floored-ratio
// bin estimates on each side. s must be retained.
absl::StatusOr<double> CusumPrivate(const PrefixState& state, int64_t s,
                                    int64_t t);

// Same with plain bin means, maximised over bins observed on both sides of
// the split. A bin empty on one side is skipped: its 0/0 = 0 estimate would
// otherwise be compared with the other side's mean and report the level of
// the regression function rather than a change in it.
absl::StatusOr<double> CusumNonprivate(const PrefixState& state, int64_t s,
                                       int64_t t);

// |sqrt((t-s)/(ts)) S_s - sqrt(s/(t(t-s))) (S_t - S_s)| where S is the prefix
// sum with prefix[0] = 0.
absl::StatusOr<double> CusumUnivariate(std::span<const double> prefix,
                                       int64_t s, int64_t t);

namespace internal {

double CusumPrivateUnchecked(const PrefixState& state, int64_t s, int64_t t);
double CusumNonprivateUnchecked(const PrefixState& state, int64_t s, int64_t t);

inline double CusumUnivariateUnchecked(double sum_s, double sum_t, int64_t s,
                                       int64_t t) {
  const double sd = static_cast<double>(s);
  const double td = static_cast<double>(t);
  return std::abs(std::sqrt((td - sd) / (td * sd)) * sum_s -
                  std::sqrt(sd / (td * (td - sd))) * (sum_t - sum_s));
}

}  // namespace internal

// Streaming engines. Each consumes one observation per step and evaluates
// the statistic at the current time for any retained split.

class PrivateRegressionEngine {
 public:
  using Observation = PrivateObservation;

  PrivateRegressionEngine(int64_t num_bins, Retention retention);

  absl::Status Push(const Observation& obs);
  void Reset(int64_t origin) { state_.Reset(origin); }
  int64_t time() const { return state_.time(); }
  int64_t origin() const { return state_.origin(); }
  void Candidates(std::vector<int64_t>& out) const { state_.SplitCandidates(out); }
  double Statistic(int64_t s) const {
    return internal::CusumPrivateUnchecked(state_, s, state_.time());
  }
  const PrefixState& state() const { return state_; }

 private:
  PrefixState state_;
  Eigen::VectorXd row_;
};

class NonprivateRegressionEngine {
 public:
  using Observation = RawObservation;

  NonprivateRegressionEngine(BinPartition partition, Retention retention);

  absl::Status Push(const Observation& obs);
  void Reset(int64_t origin) { state_.Reset(origin); }
  int64_t time() const { return state_.time(); }
  int64_t origin() const { return state_.origin(); }
  void Candidates(std::vector<int64_t>& out) const { state_.SplitCandidates(out); }
  double Statistic(int64_t s) const {
    return internal::CusumNonprivateUnchecked(state_, s, state_.time());
  }
  const PrefixState& state() const { return state_; }

 private:
  BinPartition partition_;
  PrefixState state_;
  Eigen::VectorXd row_;
};

struct UnivariateObservation {
  int64_t time_index = 0;
  double z = 0.0;
};

class UnivariateEngine {
 public:
  using Observation = UnivariateObservation;

  explicit UnivariateEngine(Retention retention);

  absl::Status Push(const Observation& obs);
  void Reset(int64_t origin) { state_.Reset(origin); }
  int64_t time() const { return state_.time(); }
  int64_t origin() const { return state_.origin(); }
  void Candidates(std::vector<int64_t>& out) const { state_.SplitCandidates(out); }
  double Statistic(int64_t s) const {
    const int64_t t = state_.time();
    return internal::CusumUnivariateUnchecked(state_.Cumulative(s)[0],
                                              state_.Cumulative(t)[0], s, t);
  }
  const PrefixState& state() const { return state_; }

 private:
  PrefixState state_;
};

}  // namespace privcusum

#endif  // PRIVCUSUM_CUSUM_H_
