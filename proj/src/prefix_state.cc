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

#include "privcusum/prefix_state.h"

#include <algorithm>
#include <bit>

#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

bool KeepDyadic(int64_t index, int64_t now) {
  if (index == 0 || index == now) return true;
  const uint64_t gap = static_cast<uint64_t>(now - index);
  const int level = std::bit_width(gap) - 1;  // floor(log2(gap))
  const int shift = std::max(0, level - 1);
  return (static_cast<uint64_t>(index) & ((uint64_t{1} << shift) - 1)) == 0;
}

}  // namespace

PrefixState::PrefixState(int64_t width, Retention retention, int64_t origin)
    : width_(width), retention_(retention), origin_(origin) {
  Reset(origin);
}

void PrefixState::Reset(int64_t origin) {
  origin_ = origin;
  time_ = 0;
  indices_.assign(1, 0);
  rows_.assign(width_, 0.0);
}

absl::Status PrefixState::Push(int64_t time_index,
                               const Eigen::Ref<const Eigen::VectorXd>& row) {
  if (time_index != origin_ + time_ + 1) {
    return absl::FailedPreconditionError(
        absl::StrCat("out-of-order observation: expected time ",
                     origin_ + time_ + 1, ", got ", time_index));
  }
  if (row.size() != width_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "row has width ", row.size(), ", state expects ", width_));
  }
  const size_t last = rows_.size() - width_;
  rows_.resize(rows_.size() + width_);
  Eigen::Map<Eigen::VectorXd> next(rows_.data() + last + width_, width_);
  next = Eigen::Map<const Eigen::VectorXd>(rows_.data() + last, width_) + row;
  ++time_;
  indices_.push_back(time_);
  if (retention_ == Retention::kDyadic) Prune();
  return absl::OkStatus();
}

void PrefixState::Prune() {
  size_t keep = 0;
  for (size_t i = 0; i < indices_.size(); ++i) {
    if (!KeepDyadic(indices_[i], time_)) continue;
    if (keep != i) {
      indices_[keep] = indices_[i];
      std::copy_n(rows_.begin() + i * width_, width_,
                  rows_.begin() + keep * width_);
    }
    ++keep;
  }
  indices_.resize(keep);
  rows_.resize(keep * width_);
}

int64_t PrefixState::Slot(int64_t index) const {
  if (retention_ == Retention::kAll) {
    return (index >= 0 && index <= time_) ? index : -1;
  }
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return -1;
  return it - indices_.begin();
}

bool PrefixState::IsRetained(int64_t index) const { return Slot(index) >= 0; }

std::vector<int64_t> PrefixState::RetainedIndices() const { return indices_; }

PrefixState::ConstRow PrefixState::Cumulative(int64_t index) const {
  return ConstRow(rows_.data() + Slot(index) * width_, width_);
}

absl::Status PrefixState::SegmentSum(int64_t from, int64_t to,
                                     Eigen::VectorXd& out) const {
  if (from > to) {
    return absl::InvalidArgumentError(
        absl::StrCat("segment (", from, ", ", to, "] is reversed"));
  }
  const int64_t a = Slot(from);
  const int64_t b = Slot(to);
  if (a < 0 || b < 0) {
    return absl::NotFoundError(absl::StrCat(
        "segment (", from, ", ", to, "] has an endpoint that is not retained"));
  }
  out = ConstRow(rows_.data() + b * width_, width_) -
        ConstRow(rows_.data() + a * width_, width_);
  return absl::OkStatus();
}

void PrefixState::SplitCandidates(std::vector<int64_t>& out) const {
  if (retention_ == Retention::kAll) {
    for (int64_t s = 1; s < time_; ++s) out.push_back(s);
    return;
  }
  for (int64_t index : indices_) {
    if (index >= 1 && index < time_) out.push_back(index);
  }
}

}  // namespace privcusum
