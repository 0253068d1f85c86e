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

#include "privcusum/partition.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

// Guards ceil(length / h) against representation error when h divides the
// axis length exactly.
constexpr double kCountSlack = 1e-12;

}  // namespace

BinPartition::BinPartition(Eigen::VectorXd lower, Eigen::VectorXd upper,
                           double bin_width, Eigen::VectorXi bins_per_axis)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      bin_width_(bin_width),
      bins_per_axis_(std::move(bins_per_axis)) {
  num_bins_ = 1;
  for (int a = 0; a < bins_per_axis_.size(); ++a) num_bins_ *= bins_per_axis_[a];
}

absl::StatusOr<BinPartition> BinPartition::Create(const Eigen::VectorXd& lower,
                                                  const Eigen::VectorXd& upper,
                                                  double bin_width) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    return absl::InvalidArgumentError(
        "domain bounds must be non-empty and of equal dimension");
  }
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    return absl::InvalidArgumentError(
        absl::StrCat("bin width must be positive, got ", bin_width));
  }
  Eigen::VectorXi counts(lower.size());
  for (int a = 0; a < lower.size(); ++a) {
    const double length = upper[a] - lower[a];
    if (!(length > 0.0) || !std::isfinite(length)) {
      return absl::InvalidArgumentError(
          absl::StrCat("degenerate domain along axis ", a));
    }
    if (bin_width > length * (1.0 + kCountSlack)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "bin width ", bin_width, " exceeds axis length ", length));
    }
    counts[a] = std::max(
        1, static_cast<int>(std::ceil(length / bin_width * (1.0 - kCountSlack))));
  }
  return BinPartition(lower, upper, bin_width, std::move(counts));
}

absl::StatusOr<BinPartition> BinPartition::UnitCube(int dim, double bin_width) {
  if (dim < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  return Create(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim),
                bin_width);
}

bool BinPartition::Contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower_.size()) return false;
  return (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

absl::StatusOr<int64_t> BinPartition::Locate(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "point has dimension ", x.size(), ", partition has ", lower_.size()));
  }
  if (!Contains(x)) {
    return absl::OutOfRangeError("point lies outside the partition domain");
  }
  int64_t bin = 0;
  for (int a = 0; a < lower_.size(); ++a) {
    const double offset = (x[a] - lower_[a]) / bin_width_;
    int k = static_cast<int>(std::ceil(offset)) - 1;
    k = std::clamp(k, 0, bins_per_axis_[a] - 1);
    // Reconcile with the edges InBin compares against.
    if (k + 1 < bins_per_axis_[a] && x[a] > lower_[a] + bin_width_ * (k + 1)) ++k;
    if (k > 0 && x[a] <= lower_[a] + bin_width_ * k) --k;
    bin = bin * bins_per_axis_[a] + k;
  }
  return bin;
}

Eigen::VectorXi BinPartition::AxisIndices(int64_t bin) const {
  Eigen::VectorXi k(lower_.size());
  for (int a = static_cast<int>(lower_.size()) - 1; a >= 0; --a) {
    k[a] = static_cast<int>(bin % bins_per_axis_[a]);
    bin /= bins_per_axis_[a];
  }
  return k;
}

Eigen::VectorXd BinPartition::Center(int64_t bin) const {
  return lower_ +
         bin_width_ * (AxisIndices(bin).cast<double>().array() + 0.5).matrix();
}

Eigen::VectorXd BinPartition::BinLower(int64_t bin) const {
  return lower_ + bin_width_ * AxisIndices(bin).cast<double>();
}

Eigen::VectorXd BinPartition::BinUpper(int64_t bin) const {
  Eigen::VectorXd hi =
      lower_ +
      bin_width_ * (AxisIndices(bin).cast<double>().array() + 1.0).matrix();
  return hi.cwiseMin(upper_);
}

double BinPartition::Volume(int64_t bin) const {
  return (BinUpper(bin) - BinLower(bin)).prod();
}

bool BinPartition::InBin(int64_t bin,
                         const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXi k = AxisIndices(bin);
  const Eigen::VectorXd lo = BinLower(bin);
  const Eigen::VectorXd hi = BinUpper(bin);
  for (int a = 0; a < lower_.size(); ++a) {
    const bool closed_below = k[a] == 0;
    if (x[a] > hi[a]) return false;
    if (closed_below ? x[a] < lo[a] : x[a] <= lo[a]) return false;
  }
  return true;
}

double BinPartition::Diameter() const {
  return std::sqrt(static_cast<double>(dim())) * bin_width_;
}

DensityFloor UniformDensityFloor(const BinPartition& partition) {
  double min_volume = partition.Volume(0);
  for (int64_t j = 1; j < partition.num_bins(); ++j) {
    min_volume = std::min(min_volume, partition.Volume(j));
  }
  const double cube = std::pow(partition.bin_width(), partition.dim());
  return {min_volume / (partition.DomainVolume() * cube), false};
}

absl::StatusOr<DensityFloor> EstimateDensityFloor(
    const BinPartition& partition, std::span<const Eigen::VectorXd> points) {
  if (points.empty()) {
    return absl::InvalidArgumentError("calibration sample is empty");
  }
  std::vector<int64_t> counts(partition.num_bins(), 0);
  for (const Eigen::VectorXd& x : points) {
    absl::StatusOr<int64_t> bin = partition.Locate(x);
    if (!bin.ok()) return bin.status();
    ++counts[*bin];
  }
  const int64_t min_count = *std::min_element(counts.begin(), counts.end());
  const double cube = std::pow(partition.bin_width(), partition.dim());
  return DensityFloor{
      static_cast<double>(min_count) / static_cast<double>(points.size()) / cube,
      true};
}

}  // namespace privcusum
