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

#ifndef PRIVCUSUM_ESTIMATORS_H_
#define PRIVCUSUM_ESTIMATORS_H_

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privcusum/partition.h"
#include "privcusum/prefix_state.h"
#include "privcusum/privacy.h"

namespace privcusum {

// Prefix rows are laid out as [a_1..a_N, b_1..b_N]: (w, z) for privatised
// streams, (1{X in A_j}, Y 1{X in A_j}) for raw streams.

// Smallest mean noisy mass a bin needs over a segment of `length`
// observations before its ratio estimate is used: log(length + 1) / length.
inline double MassFloor(int64_t length) {
  const double n = static_cast<double>(length);
  return std::log(n + 1.0) / n;
}

// Per-bin nu / mu, zeroed wherever mu < MassFloor(length). Inputs are segment
// sums; the common 1/length factor cancels in the ratio.
template <typename DerivedW, typename DerivedZ>
Eigen::Matrix<typename DerivedW::Scalar, Eigen::Dynamic, 1> FlooredBinRatio(
    const Eigen::MatrixBase<DerivedW>& sum_w,
    const Eigen::MatrixBase<DerivedZ>& sum_z, int64_t length) {
  using Scalar = typename DerivedW::Scalar;
  const Scalar floor = static_cast<Scalar>(MassFloor(length));
  const Scalar n = static_cast<Scalar>(length);
  return ((sum_w.array() / n) >= floor)
      .select(sum_z.array() / sum_w.array(), Scalar(0))
      .matrix();
}

// Per-bin sum_y / count with 0/0 = 0.
template <typename DerivedC, typename DerivedY>
Eigen::Matrix<typename DerivedC::Scalar, Eigen::Dynamic, 1> BinMean(
    const Eigen::MatrixBase<DerivedC>& count,
    const Eigen::MatrixBase<DerivedY>& sum_y) {
  using Scalar = typename DerivedC::Scalar;
  return (count.array() > Scalar(0))
      .select(sum_y.array() / count.array(), Scalar(0))
      .matrix();
}

Eigen::VectorXd PrivateRow(const PrivateObservation& obs);

absl::Status PushPrivate(PrefixState& state, const PrivateObservation& obs);

absl::Status PushRaw(PrefixState& state, const RawObservation& obs,
                     const BinPartition& partition);

// Binned estimate over the inclusive local segment [s, t] of a privatised
// stream, one value per bin. Needs s - 1 and t retained.
absl::StatusOr<Eigen::VectorXd> EstimatePrivate(const PrefixState& state,
                                                const BinPartition& partition,
                                                int64_t s, int64_t t);

// Per-bin response average over [s, t] of a raw stream; empty bins give 0.
absl::StatusOr<Eigen::VectorXd> EstimateNonprivate(
    const PrefixState& state, const BinPartition& partition, int64_t s,
    int64_t t);

}  // namespace privcusum

#endif  // PRIVCUSUM_ESTIMATORS_H_
