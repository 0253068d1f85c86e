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

#include "privcusum/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privcusum {
namespace {

constexpr double kAuditInfinity = std::numeric_limits<double>::infinity();

}  // namespace

absl::StatusOr<PrivacyParams> PrivacyParams::Create(double alpha,
                                                    double truncation_m) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1], got ", alpha));
  }
  if (!(truncation_m > 0.0) || !std::isfinite(truncation_m)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncation level must be positive, got ", truncation_m));
  }
  return PrivacyParams{alpha, truncation_m};
}

absl::StatusOr<UnivariateChannel> UnivariateChannel::Create(
    double alpha, double interval_length) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be positive, got ", alpha));
  }
  if (!(interval_length > 0.0) || !std::isfinite(interval_length)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "interval length must be positive, got ", interval_length));
  }
  return UnivariateChannel{alpha, interval_length};
}

double LaplaceQuantile(double u, double scale) {
  if (u == 0.5) return 0.0;
  return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

absl::StatusOr<double> SampleLaplace(RandomStream& rng, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", scale));
  }
  return LaplaceQuantile(rng.Uniform(), scale);
}

double ClampResponse(double y, double m) { return std::clamp(y, -m, m); }

absl::StatusOr<std::pair<Eigen::VectorXd, Eigen::VectorXd>> EncodeRegression(
    const RawObservation& obs, const RegressionChannel& channel) {
  absl::StatusOr<int64_t> bin = channel.partition.Locate(obs.x);
  if (!bin.ok()) {
    return absl::Status(bin.status().code(),
                        absl::StrCat("time ", obs.time_index, ": ",
                                     bin.status().message()));
  }
  const int64_t n = channel.partition.num_bins();
  std::pair<Eigen::VectorXd, Eigen::VectorXd> enc{Eigen::VectorXd::Zero(n),
                                                  Eigen::VectorXd::Zero(n)};
  enc.first[*bin] = 1.0;
  enc.second[*bin] = ClampResponse(obs.y, channel.params.truncation_m);
  return enc;
}

absl::StatusOr<PrivateObservation> PrivatizeRegression(
    const RawObservation& obs, const RegressionChannel& channel,
    const CounterRng& rng) {
  absl::StatusOr<std::pair<Eigen::VectorXd, Eigen::VectorXd>> enc =
      EncodeRegression(obs, channel);
  if (!enc.ok()) return enc.status();
  PrivateObservation out{obs.time_index, std::move(enc->first),
                         std::move(enc->second)};
  if (rng.zero_noise()) return out;
  const double scale_w = channel.params.indicator_noise_scale();
  const double scale_z = channel.params.response_noise_scale();
  const uint64_t t = static_cast<uint64_t>(obs.time_index);
  for (int64_t j = 0; j < out.w.size(); ++j) {
    const uint64_t bin = static_cast<uint64_t>(j);
    out.w[j] += LaplaceQuantile(
        rng.Uniform(t, bin, static_cast<uint64_t>(NoiseKind::kIndicator)),
        scale_w);
    out.z[j] += LaplaceQuantile(
        rng.Uniform(t, bin, static_cast<uint64_t>(NoiseKind::kResponse)),
        scale_z);
  }
  return out;
}

double PrivatizeUnivariate(double x, int64_t time_index,
                           const UnivariateChannel& channel,
                           const CounterRng& rng) {
  const double u = rng.Uniform(static_cast<uint64_t>(time_index), 0,
                               static_cast<uint64_t>(NoiseKind::kScalar));
  return x + LaplaceQuantile(u, channel.noise_scale());
}

absl::StatusOr<double> AuditPrivacyLoss(const RegressionChannel& channel,
                                        const RawObservation& a,
                                        const RawObservation& b,
                                        const PrivateObservation& out) {
  const int64_t n = channel.partition.num_bins();
  if (out.w.size() != n || out.z.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "output has ", out.w.size(), "/", out.z.size(),
        " coordinates, channel has ", n, " bins"));
  }
  auto enc_a = EncodeRegression(a, channel);
  if (!enc_a.ok()) return enc_a.status();
  auto enc_b = EncodeRegression(b, channel);
  if (!enc_b.ok()) return enc_b.status();
  const double rate_w = 1.0 / channel.params.indicator_noise_scale();
  const double rate_z = 1.0 / channel.params.response_noise_scale();
  const double loss_w = ((out.w - enc_b->first).cwiseAbs() -
                         (out.w - enc_a->first).cwiseAbs())
                            .sum();
  const double loss_z = ((out.z - enc_b->second).cwiseAbs() -
                         (out.z - enc_a->second).cwiseAbs())
                            .sum();
  return loss_w * rate_w + loss_z * rate_z;
}

double AuditPrivacyLoss(const UnivariateChannel& channel, double a, double b,
                        double out) {
  return (std::abs(out - b) - std::abs(out - a)) / channel.noise_scale();
}

AuditReport RandomizedAudit(const RegressionChannel& channel, int64_t trials,
                            uint64_t seed, double tolerance) {
  const BinPartition& partition = channel.partition;
  const double m = channel.params.truncation_m;
  const CounterRng root(seed);
  RandomStream rng(root.Fork(0));
  const CounterRng noise = root.Fork(1);
  AuditReport report{trials, -kAuditInfinity, 0, channel.params.alpha};
  auto draw_record = [&](int64_t t) {
    RawObservation obs;
    obs.time_index = t;
    obs.x.resize(partition.dim());
    for (int a = 0; a < partition.dim(); ++a) {
      obs.x[a] = partition.lower()[a] +
                 rng.Uniform() * (partition.upper()[a] - partition.lower()[a]);
    }
    obs.y = (2.0 * rng.Uniform() - 1.0) * 3.0 * m;
    return obs;
  };
  for (int64_t i = 0; i < trials; ++i) {
    const RawObservation a = draw_record(i);
    const RawObservation b = draw_record(i);
    PrivateObservation out;
    if (i % 2 == 0) {
      out = *PrivatizeRegression(i % 4 == 0 ? a : b, channel, noise);
    } else {
      const int64_t n = partition.num_bins();
      out.w.resize(n);
      out.z.resize(n);
      for (int64_t j = 0; j < n; ++j) {
        out.w[j] = -2.0 + 4.0 * rng.Uniform();
        out.z[j] = (-2.0 + 4.0 * rng.Uniform()) * m;
      }
    }
    const double loss = *AuditPrivacyLoss(channel, a, b, out);
    report.max_loss = std::max(report.max_loss, loss);
    if (loss > report.bound + tolerance) ++report.violations;
  }
  return report;
}

AuditReport RandomizedAudit(const UnivariateChannel& channel, int64_t trials,
                            uint64_t seed, double tolerance) {
  const CounterRng root(seed);
  RandomStream rng(root.Fork(0));
  const CounterRng noise = root.Fork(1);
  AuditReport report{trials, -kAuditInfinity, 0, channel.alpha};
  const double len = channel.interval_length;
  for (int64_t i = 0; i < trials; ++i) {
    const double a = rng.Uniform() * len;
    const double b = rng.Uniform() * len;
    const double out = i % 2 == 0
                           ? PrivatizeUnivariate(i % 4 == 0 ? a : b, i, channel, noise)
                           : (-2.0 + 5.0 * rng.Uniform()) * len;
    const double loss = AuditPrivacyLoss(channel, a, b, out);
    report.max_loss = std::max(report.max_loss, loss);
    if (loss > report.bound + tolerance) ++report.violations;
  }
  return report;
}

double LaplaceMeanTailBound(int64_t n, double x) {
  return std::exp(-3.0 * static_cast<double>(n) * x * x / (4.0 + 3.0 * x));
}

}  // namespace privcusum
