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

#include "privcusum/estimators.h"

#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

absl::Status CheckSegment(const PrefixState& state,
                          const BinPartition& partition, int64_t s,
                          int64_t t) {
  if (state.width() != 2 * partition.num_bins()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "state holds ", state.width() / 2, " bins, partition has ",
        partition.num_bins()));
  }
  if (s < 1 || s > t || t > state.time()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "segment [", s, ", ", t, "] invalid at time ", state.time()));
  }
  return absl::OkStatus();
}

}  // namespace

Eigen::VectorXd PrivateRow(const PrivateObservation& obs) {
  Eigen::VectorXd row(obs.w.size() + obs.z.size());
  row << obs.w, obs.z;
  return row;
}

absl::Status PushPrivate(PrefixState& state, const PrivateObservation& obs) {
  if (obs.w.size() != obs.z.size()) {
    return absl::InvalidArgumentError("w and z lengths differ");
  }
  return state.Push(obs.time_index, PrivateRow(obs));
}

absl::Status PushRaw(PrefixState& state, const RawObservation& obs,
                     const BinPartition& partition) {
  absl::StatusOr<int64_t> bin = partition.Locate(obs.x);
  if (!bin.ok()) return bin.status();
  const int64_t n = partition.num_bins();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * n);
  row[*bin] = 1.0;
  row[n + *bin] = obs.y;
  return state.Push(obs.time_index, row);
}

absl::StatusOr<Eigen::VectorXd> EstimatePrivate(const PrefixState& state,
                                                const BinPartition& partition,
                                                int64_t s, int64_t t) {
  if (absl::Status st = CheckSegment(state, partition, s, t); !st.ok()) return st;
  Eigen::VectorXd sums;
  if (absl::Status st = state.SegmentSum(s - 1, t, sums); !st.ok()) return st;
  const int64_t n = partition.num_bins();
  return FlooredBinRatio(sums.head(n), sums.tail(n), t - s + 1);
}

absl::StatusOr<Eigen::VectorXd> EstimateNonprivate(
    const PrefixState& state, const BinPartition& partition, int64_t s,
    int64_t t) {
  if (absl::Status st = CheckSegment(state, partition, s, t); !st.ok()) return st;
  Eigen::VectorXd sums;
  if (absl::Status st = state.SegmentSum(s - 1, t, sums); !st.ok()) return st;
  const int64_t n = partition.num_bins();
  return BinMean(sums.head(n), sums.tail(n));
}

}  // namespace privcusum
