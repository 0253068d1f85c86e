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

#ifndef PRIVCUSUM_PRIVACY_H_
#define PRIVCUSUM_PRIVACY_H_

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "privcusum/partition.h"
#include "privcusum/random.h"

namespace privcusum {

// A raw record (X_i, Y_i). Univariate streams leave `x` empty.
struct RawObservation {
  int64_t time_index = 0;
  Eigen::VectorXd x;
  double y = 0.0;
};

// Randomised image of a regression record: one noisy indicator and one noisy
// clamped response per bin.
struct PrivateObservation {
  int64_t time_index = 0;
  Eigen::VectorXd w;
  Eigen::VectorXd z;
};

struct PrivacyParams {
  double alpha = 1.0;
  double truncation_m = 1.0;

  // alpha in (0, 1], truncation_m > 0.
  static absl::StatusOr<PrivacyParams> Create(double alpha, double truncation_m);

  double indicator_noise_scale() const { return 4.0 / alpha; }
  double response_noise_scale() const { return 4.0 * truncation_m / alpha; }
};

// Binned indicator/response channel over a fixed partition.
struct RegressionChannel {
  BinPartition partition;
  PrivacyParams params;
};

// Additive Laplace channel for values in an interval of length
// `interval_length`; the noise scale is interval_length / alpha.
struct UnivariateChannel {
  double alpha = 1.0;
  double interval_length = 1.0;

  static absl::StatusOr<UnivariateChannel> Create(double alpha,
                                                  double interval_length = 1.0);

  double noise_scale() const { return interval_length / alpha; }
};

// Which noise coordinate a draw feeds. Part of the counter triple.
enum class NoiseKind : uint64_t { kIndicator = 1, kResponse = 2, kScalar = 3 };

// Inverse CDF of the Laplace law with the given scale. u in (0, 1).
double LaplaceQuantile(double u, double scale);

absl::StatusOr<double> SampleLaplace(RandomStream& rng, double scale);

// [y] clamped to [-m, m].
double ClampResponse(double y, double m);

// Noiseless one-hot indicator and clamped-response encodings.
absl::StatusOr<std::pair<Eigen::VectorXd, Eigen::VectorXd>> EncodeRegression(
    const RawObservation& obs, const RegressionChannel& channel);

// W_j = 1{X in A_j} + (4/alpha) eps_j,  Z_j = [Y]_M 1{X in A_j} + (4M/alpha) zeta_j.
// Noise for bin j at time t is drawn from rng at (t, j, kind).
absl::StatusOr<PrivateObservation> PrivatizeRegression(
    const RawObservation& obs, const RegressionChannel& channel,
    const CounterRng& rng);

// x + (L/alpha) eps, with eps drawn from rng at (time_index, 0, kScalar).
double PrivatizeUnivariate(double x, int64_t time_index,
                           const UnivariateChannel& channel,
                           const CounterRng& rng);

// log q(out | a) - log q(out | b) for the product-Laplace channel density.
absl::StatusOr<double> AuditPrivacyLoss(const RegressionChannel& channel,
                                        const RawObservation& a,
                                        const RawObservation& b,
                                        const PrivateObservation& out);

double AuditPrivacyLoss(const UnivariateChannel& channel, double a, double b,
                        double out);

struct AuditReport {
  int64_t trials = 0;
  double max_loss = 0.0;
  int64_t violations = 0;  // losses above bound + tolerance
  double bound = 0.0;
};

// Randomised search for the worst log-density ratio. Inputs are drawn
// uniformly over the domain with responses in [-3M, 3M]; half the outputs
// come from the channel applied to one input, half uniformly from a box
// around the encodings.
AuditReport RandomizedAudit(const RegressionChannel& channel, int64_t trials,
                            uint64_t seed, double tolerance = 1e-12);

// Inputs uniform on [0, interval_length]; bound alpha.
AuditReport RandomizedAudit(const UnivariateChannel& channel, int64_t trials,
                            uint64_t seed, double tolerance = 1e-12);

// P(mean of n standard Laplace >= x) <= exp(-3 n x^2 / (4 + 3x)).
double LaplaceMeanTailBound(int64_t n, double x);

}  // namespace privcusum

#endif  // PRIVCUSUM_PRIVACY_H_
