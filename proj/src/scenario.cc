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

#include "privcusum/scenario.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

bool SameShape(const RegressionFunction& a, const RegressionFunction& b) {
  if (a.height == 0.0 || b.height == 0.0) return true;
  return a.radius == b.radius && a.center.size() == b.center.size() &&
         a.center == b.center;
}

// Grid points per axis for the numeric sup-norm fallback.
int GridPointsPerAxis(int dim) {
  return dim == 1 ? 100001 : (dim == 2 ? 1001 : (dim == 3 ? 101 : 21));
}

}  // namespace

RegressionFunction RegressionFunction::Constant(double value) {
  return RegressionFunction{value, 0.0, Eigen::VectorXd(), 1.0};
}

RegressionFunction RegressionFunction::Bump(double offset, double height,
                                            Eigen::VectorXd center,
                                            double radius) {
  return RegressionFunction{offset, height, std::move(center), radius};
}

double RegressionFunction::operator()(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (height == 0.0) return offset;
  const double dist = (x - center).norm();
  return offset + height * std::max(0.0, 1.0 - dist / radius);
}

double RegressionFunction::Lipschitz() const {
  return height == 0.0 ? 0.0 : std::abs(height) / radius;
}

std::pair<double, double> RegressionFunction::ProfileRange(
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const {
  if (height == 0.0) return {0.0, 0.0};
  const Eigen::VectorXd nearest = center.cwiseMax(lower).cwiseMin(upper);
  const Eigen::VectorXd far =
      (center - lower).cwiseAbs().cwiseMax((center - upper).cwiseAbs());
  const double hi = std::max(0.0, 1.0 - (nearest - center).norm() / radius);
  const double lo = std::max(0.0, 1.0 - far.norm() / radius);
  return {lo, hi};
}

double RegressionFunction::SupNorm(const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper) const {
  const auto [lo, hi] = ProfileRange(lower, upper);
  return std::max(std::abs(offset + height * lo), std::abs(offset + height * hi));
}

double SupNormGap(const RegressionFunction& pre, const RegressionFunction& post,
                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (SameShape(pre, post)) {
    const RegressionFunction& shaped = pre.height != 0.0 ? pre : post;
    const auto [lo, hi] = shaped.ProfileRange(lower, upper);
    const double d_offset = post.offset - pre.offset;
    const double d_height = post.height - pre.height;
    return std::max(std::abs(d_offset + d_height * lo),
                    std::abs(d_offset + d_height * hi));
  }
  const int dim = static_cast<int>(lower.size());
  const int per_axis = GridPointsPerAxis(dim);
  int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= per_axis;
  double best = 0.0;
  Eigen::VectorXd x(dim);
  for (int64_t i = 0; i < total; ++i) {
    int64_t rem = i;
    for (int a = dim - 1; a >= 0; --a) {
      const double frac = static_cast<double>(rem % per_axis) / (per_axis - 1);
      x[a] = lower[a] + frac * (upper[a] - lower[a]);
      rem /= per_axis;
    }
    best = std::max(best, std::abs(post(x) - pre(x)));
  }
  for (const RegressionFunction* f : {&pre, &post}) {
    if (f->height == 0.0) continue;
    const Eigen::VectorXd c = f->center.cwiseMax(lower).cwiseMin(upper);
    best = std::max(best, std::abs(post(c) - pre(c)));
  }
  return best;
}

absl::Status ScenarioSpec::Validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError("sigma must be non-negative");
  }
  if (horizon < 2) return absl::InvalidArgumentError("horizon must be >= 2");
  if (change_time < 1) {
    return absl::InvalidArgumentError("change time must be >= 1");
  }
  if (kind == ScenarioKind::kUnivariate) return absl::OkStatus();
  if (lower.size() == 0 || lower.size() != upper.size() ||
      !((upper - lower).array() > 0.0).all()) {
    return absl::InvalidArgumentError("regression domain box is degenerate");
  }
  for (const RegressionFunction* f : {&pre_fn, &post_fn}) {
    if (f->height != 0.0 &&
        (f->center.size() != lower.size() || !(f->radius > 0.0))) {
      return absl::InvalidArgumentError(
          "bump centre dimension or radius is invalid");
    }
  }
  if (x_law == CovariateLaw::kUniformBall) {
    if (!(ball_radius > 0.0) ||
        !((lower.array() <= -ball_radius).all() &&
          (upper.array() >= ball_radius).all())) {
      return absl::InvalidArgumentError(
          "covariate ball must lie inside the domain box");
    }
  }
  if (x_law == CovariateLaw::kBinWeighted) {
    absl::StatusOr<BinPartition> grid =
        BinPartition::Create(lower, upper, weight_bin_width);
    if (!grid.ok()) return grid.status();
    if (static_cast<int64_t>(bin_weights.size()) != grid->num_bins()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "expected ", grid->num_bins(), " bin weights, got ",
          bin_weights.size()));
    }
    double total = 0.0;
    for (double w : bin_weights) {
      if (!(w >= 0.0)) return absl::InvalidArgumentError("negative bin weight");
      total += w;
    }
    if (!(total > 0.0)) return absl::InvalidArgumentError("bin weights sum to 0");
  }
  return absl::OkStatus();
}

double ScenarioSpec::M0() const {
  if (kind == ScenarioKind::kUnivariate) {
    return std::max(std::abs(pre_mean), std::abs(post_mean));
  }
  return std::max(pre_fn.SupNorm(lower, upper), post_fn.SupNorm(lower, upper));
}

double ScenarioSpec::CLip() const {
  if (kind == ScenarioKind::kUnivariate) return 0.0;
  return std::max(pre_fn.Lipschitz(), post_fn.Lipschitz());
}

double ScenarioSpec::Mean(int64_t time_index,
                          const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const bool after = time_index > change_time;
  if (kind == ScenarioKind::kUnivariate) return after ? post_mean : pre_mean;
  return after ? post_fn(x) : pre_fn(x);
}

ScenarioSpec UnivariateScenario(double pre_mean, double post_mean,
                                int64_t change_time, double sigma,
                                int64_t horizon, NoiseLaw noise) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::kUnivariate;
  spec.pre_mean = pre_mean;
  spec.post_mean = post_mean;
  spec.kappa = std::abs(post_mean - pre_mean);
  spec.change_time = change_time;
  spec.sigma = sigma;
  spec.horizon = horizon;
  spec.noise = noise;
  return spec;
}

ScenarioSpec RegressionScenario(Eigen::VectorXd lower, Eigen::VectorXd upper,
                                RegressionFunction pre, RegressionFunction post,
                                int64_t change_time, double sigma,
                                int64_t horizon) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::kRegression;
  spec.kappa = SupNormGap(pre, post, lower, upper);
  spec.lower = std::move(lower);
  spec.upper = std::move(upper);
  spec.pre_fn = std::move(pre);
  spec.post_fn = std::move(post);
  spec.change_time = change_time;
  spec.sigma = sigma;
  spec.horizon = horizon;
  return spec;
}

absl::StatusOr<ScenarioSpec> LowerBoundRegression(double kappa, double sigma,
                                                  int dim, double gamma,
                                                  int64_t change_time,
                                                  int64_t horizon) {
  if (!(kappa > 0.0) || !(sigma > 0.0) || dim < 1) {
    return absl::InvalidArgumentError(
        "kappa and sigma must be positive, dimension >= 1");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in (0, 1)");
  }
  const double radius =
      std::max(std::pow(8.0 * sigma * sigma * std::log(1.0 / gamma) /
                            (kappa * kappa),
                        1.0 / dim),
               2.0 * kappa);
  ScenarioSpec spec = RegressionScenario(
      Eigen::VectorXd::Constant(dim, -radius),
      Eigen::VectorXd::Constant(dim, radius), RegressionFunction::Constant(0.0),
      RegressionFunction::Bump(0.0, kappa, Eigen::VectorXd::Zero(dim), kappa),
      change_time, sigma, horizon);
  spec.x_law = CovariateLaw::kUniformBall;
  spec.ball_radius = radius;
  return spec;
}

absl::StatusOr<ScenarioSpec> LowerBoundUnivariate(double kappa, double sigma,
                                                  int64_t change_time,
                                                  int64_t horizon) {
  if (!(kappa > 0.0) || !(sigma > 0.0)) {
    return absl::InvalidArgumentError("kappa and sigma must be positive");
  }
  if (!(kappa < 2.0 * sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need kappa < 2 sigma, got kappa=", kappa, " sigma=", sigma));
  }
  // Unif[0, 2 sigma] is sigma + Unif[-sigma, sigma].
  return UnivariateScenario(sigma, sigma + kappa, change_time, sigma, horizon,
                            NoiseLaw::kUniform);
}

StreamGenerator::StreamGenerator(ScenarioSpec spec, uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  if (spec_.kind == ScenarioKind::kRegression &&
      spec_.x_law == CovariateLaw::kBinWeighted) {
    absl::StatusOr<BinPartition> grid =
        BinPartition::Create(spec_.lower, spec_.upper, spec_.weight_bin_width);
    if (grid.ok()) weight_grid_ = *std::move(grid);
    double running = 0.0;
    for (double w : spec_.bin_weights) {
      running += w;
      cumulative_weights_.push_back(running);
    }
  }
}

Eigen::VectorXd StreamGenerator::SampleCovariate(RandomStream& rng) const {
  const int dim = spec_.dim();
  switch (spec_.x_law) {
    case CovariateLaw::kUniformBox: {
      Eigen::VectorXd x(dim);
      for (int a = 0; a < dim; ++a) {
        x[a] = spec_.lower[a] + rng.Uniform() * (spec_.upper[a] - spec_.lower[a]);
      }
      return x;
    }
    case CovariateLaw::kUniformBall: {
      std::normal_distribution<double> normal;
      Eigen::VectorXd dir(dim);
      for (int a = 0; a < dim; ++a) dir[a] = normal(rng);
      const double r = spec_.ball_radius * std::pow(rng.Uniform(), 1.0 / dim);
      return dir.normalized() * r;
    }
    case CovariateLaw::kBinWeighted: {
      const double u = rng.Uniform() * cumulative_weights_.back();
      const int64_t bin =
          std::upper_bound(cumulative_weights_.begin(), cumulative_weights_.end(), u) -
          cumulative_weights_.begin();
      const int64_t j = std::min<int64_t>(bin, weight_grid_->num_bins() - 1);
      const Eigen::VectorXd lo = weight_grid_->BinLower(j);
      const Eigen::VectorXd hi = weight_grid_->BinUpper(j);
      Eigen::VectorXd x(dim);
      for (int a = 0; a < dim; ++a) x[a] = lo[a] + rng.Uniform() * (hi[a] - lo[a]);
      return x;
    }
  }
  return Eigen::VectorXd::Zero(dim);
}

double StreamGenerator::SampleNoise(RandomStream& rng) const {
  if (spec_.sigma == 0.0) return 0.0;
  if (spec_.noise == NoiseLaw::kUniform) {
    return spec_.sigma * (2.0 * rng.Uniform() - 1.0);
  }
  std::normal_distribution<double> normal(0.0, spec_.sigma);
  return normal(rng);
}

RawObservation StreamGenerator::Next() {
  ++time_;
  RandomStream rng(rng_.Fork(static_cast<uint64_t>(time_)));
  RawObservation obs;
  obs.time_index = time_;
  if (spec_.kind == ScenarioKind::kRegression) obs.x = SampleCovariate(rng);
  obs.y = spec_.Mean(time_, obs.x) + SampleNoise(rng);
  return obs;
}

}  // namespace privcusum
