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

#ifndef PRIVCUSUM_PREFIX_STATE_H_
#define PRIVCUSUM_PREFIX_STATE_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"

namespace privcusum {

enum class Retention {
  // Keep the cumulative row at every time index.
  kAll,
  // Keep index r while r is a multiple of 2^max(0, floor(log2(t - r)) - 1).
  // Roughly two indices survive per dyadic gap band [2^k, 2^(k+1)), so
  // memory is O(log t) rows.
  kDyadic,
};

// Running cumulative sums of fixed-width rows, so that the sum over any
// segment (s, t] of retained endpoints is cumulative(t) - cumulative(s).
//
// Indices are local: index 0 is the empty prefix and is always retained. The
// stream may start at any global origin; Push expects global time stamps
// origin + 1, origin + 2, ...
class PrefixState {
 public:
  using ConstRow = Eigen::Map<const Eigen::VectorXd>;

  explicit PrefixState(int64_t width, Retention retention = Retention::kAll,
                       int64_t origin = 0);

  absl::Status Push(int64_t time_index,
                    const Eigen::Ref<const Eigen::VectorXd>& row);

  // Drops everything and restarts local time at zero. The next accepted
  // global stamp is origin + 1.
  void Reset(int64_t origin);

  int64_t width() const { return width_; }
  int64_t time() const { return time_; }
  int64_t origin() const { return origin_; }
  Retention retention() const { return retention_; }

  bool IsRetained(int64_t index) const;
  // Ascending, includes 0 and time().
  std::vector<int64_t> RetainedIndices() const;
  int64_t num_retained() const { return static_cast<int64_t>(indices_.size()); }

  // Cumulative row at a retained local index. Unchecked.
  ConstRow Cumulative(int64_t index) const;

  // cumulative(to) - cumulative(from), both retained, from <= to.
  absl::Status SegmentSum(int64_t from, int64_t to, Eigen::VectorXd& out) const;

  // Appends the retained indices in [1, time() - 1] to `out`.
  void SplitCandidates(std::vector<int64_t>& out) const;

 private:
  int64_t Slot(int64_t index) const;
  void Prune();

  int64_t width_;
  Retention retention_;
  int64_t origin_;
  int64_t time_ = 0;
  std::vector<int64_t> indices_;
  std::vector<double> rows_;
};

}  // namespace privcusum

#endif  // PRIVCUSUM_PREFIX_STATE_H_
