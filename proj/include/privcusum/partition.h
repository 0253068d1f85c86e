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

#ifndef PRIVCUSUM_PARTITION_H_
#define PRIVCUSUM_PARTITION_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"

namespace privcusum {

// Axis-aligned grid of cubes of side h over a box domain. Cubes that overrun
// the upper face of the box are clipped to it. Along each axis a cube is the
// half-open interval (lo, hi], except the first cube which also contains the
// domain's lower face, so points on a shared face belong to the lower-index
// cube.
//
// Bins are numbered row-major with axis 0 varying slowest.
class BinPartition {
 public:
  static absl::StatusOr<BinPartition> Create(const Eigen::VectorXd& lower,
                                             const Eigen::VectorXd& upper,
                                             double bin_width);

  // Unit-cube convenience: [0, 1]^dim.
  static absl::StatusOr<BinPartition> UnitCube(int dim, double bin_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  double bin_width() const { return bin_width_; }
  int64_t num_bins() const { return num_bins_; }
  const Eigen::VectorXi& bins_per_axis() const { return bins_per_axis_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Errors with OutOfRange when x lies outside the domain.
  absl::StatusOr<int64_t> Locate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Centre of the unclipped cube.
  Eigen::VectorXd Center(int64_t bin) const;
  // Clipped cube corners.
  Eigen::VectorXd BinLower(int64_t bin) const;
  Eigen::VectorXd BinUpper(int64_t bin) const;
  double Volume(int64_t bin) const;
  bool InBin(int64_t bin, const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // sqrt(d) * h, the diameter of an unclipped cube.
  double Diameter() const;
  double DomainVolume() const { return (upper_ - lower_).prod(); }

 private:
  BinPartition(Eigen::VectorXd lower, Eigen::VectorXd upper, double bin_width,
               Eigen::VectorXi bins_per_axis);

  Eigen::VectorXi AxisIndices(int64_t bin) const;

  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  double bin_width_;
  Eigen::VectorXi bins_per_axis_;
  int64_t num_bins_;
};

struct DensityFloor {
  double value;
  // True when derived from sample frequencies rather than a known law.
  bool estimated;
};

// c_min for a uniform covariate law on the partition's domain, using the
// true (clipped) bin volumes: min_j vol(A_j) / (vol(domain) * h^d).
DensityFloor UniformDensityFloor(const BinPartition& partition);

// min over bins of (empirical frequency) / h^d over a calibration sample.
absl::StatusOr<DensityFloor> EstimateDensityFloor(
    const BinPartition& partition, std::span<const Eigen::VectorXd> points);

}  // namespace privcusum

#endif  // PRIVCUSUM_PARTITION_H_
