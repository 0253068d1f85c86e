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

#ifndef PRIVCUSUM_SCENARIO_H_
#define PRIVCUSUM_SCENARIO_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privcusum/partition.h"
#include "privcusum/privacy.h"
#include "privcusum/random.h"

namespace privcusum {

inline constexpr int64_t kNoChange = std::numeric_limits<int64_t>::max();

enum class ScenarioKind { kRegression, kUnivariate };

enum class CovariateLaw {
  kUniformBox,   // uniform on the domain box
  kUniformBall,  // uniform on the ball B(0, ball_radius) inside the box
  kBinWeighted,  // piecewise-uniform: bin j of a grid drawn w.p. weight_j
};

enum class NoiseLaw { kGaussian, kUniform };

// m(x) = offset + height * max(0, 1 - ||x - center|| / radius).
// height = 0 gives a constant; offset 0, height kappa, radius kappa gives the
// cone (kappa - ||x||)_+.
struct RegressionFunction {
  double offset = 0.0;
  double height = 0.0;
  Eigen::VectorXd center;
  double radius = 1.0;

  static RegressionFunction Constant(double value);
  static RegressionFunction Bump(double offset, double height,
                                 Eigen::VectorXd center, double radius);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double Lipschitz() const;
  // Range of the bump profile max(0, 1 - ||x - c||/r) over a box.
  std::pair<double, double> ProfileRange(const Eigen::VectorXd& lower,
                                         const Eigen::VectorXd& upper) const;
  double SupNorm(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const;
};

// sup_x |post(x) - pre(x)| over the box. Exact when both functions share the
// bump centre and radius (or either is constant); otherwise a dense grid.
double SupNormGap(const RegressionFunction& pre, const RegressionFunction& post,
                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kRegression;
  // Regression covariates.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  CovariateLaw x_law = CovariateLaw::kUniformBox;
  double ball_radius = 1.0;
  double weight_bin_width = 1.0;
  std::vector<double> bin_weights;
  RegressionFunction pre_fn;
  RegressionFunction post_fn;
  // Univariate means.
  double pre_mean = 0.0;
  double post_mean = 0.0;

  double kappa = 0.0;
  // Last pre-change time; kNoChange for a null stream.
  int64_t change_time = kNoChange;
  NoiseLaw noise = NoiseLaw::kGaussian;
  double sigma = 0.0;
  int64_t horizon = 1000;

  int dim() const { return static_cast<int>(lower.size()); }
  absl::Status Validate() const;
  // sup |m_i| over the domain (or |f_i| for univariate).
  double M0() const;
  double CLip() const;
  double Mean(int64_t time_index, const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

ScenarioSpec UnivariateScenario(double pre_mean, double post_mean,
                                int64_t change_time, double sigma,
                                int64_t horizon,
                                NoiseLaw noise = NoiseLaw::kGaussian);

// Regression scenario with kappa set from SupNormGap.
ScenarioSpec RegressionScenario(Eigen::VectorXd lower, Eigen::VectorXd upper,
                                RegressionFunction pre, RegressionFunction post,
                                int64_t change_time, double sigma,
                                int64_t horizon);

// Worst-case regression instance: X uniform on B(0, r) with
// r = max((8 sigma^2 log(1/gamma) / kappa^2)^(1/d), 2 kappa), m ≡ 0 before
// and (kappa - ||x||)_+ after, Gaussian noise.
absl::StatusOr<ScenarioSpec> LowerBoundRegression(double kappa, double sigma,
                                                  int dim, double gamma,
                                                  int64_t change_time,
                                                  int64_t horizon);

// Worst-case univariate instance: Unif[0, 2 sigma] before, shifted by kappa
// after. Requires kappa < 2 sigma.
absl::StatusOr<ScenarioSpec> LowerBoundUnivariate(double kappa, double sigma,
                                                  int64_t change_time,
                                                  int64_t horizon);

// Emits (X_t, Y_t) for t = 1, 2, ... Draws at time t depend only on (seed, t),
// never on the change time.
class StreamGenerator {
 public:
  StreamGenerator(ScenarioSpec spec, uint64_t seed);

  RawObservation Next();
  int64_t time() const { return time_; }
  const ScenarioSpec& spec() const { return spec_; }

 private:
  Eigen::VectorXd SampleCovariate(RandomStream& rng) const;
  double SampleNoise(RandomStream& rng) const;

  ScenarioSpec spec_;
  CounterRng rng_;
  int64_t time_ = 0;
  std::vector<double> cumulative_weights_;
  std::optional<BinPartition> weight_grid_;
};

}  // namespace privcusum

#endif  // PRIVCUSUM_SCENARIO_H_
