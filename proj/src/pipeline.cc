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

#include "privcusum/pipeline.h"

#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "privcusum/cusum.h"
#include "privcusum/partition.h"
#include "privcusum/privacy.h"

namespace privcusum {
namespace {

constexpr uint64_t kDataStream = 1;
constexpr uint64_t kPrivacyStream = 2;

RunOutcome MakeOutcome(const ScenarioSpec& spec, uint64_t seed,
                       const DetectionResult& result) {
  RunOutcome out;
  out.seed = seed;
  out.change_time = spec.change_time;
  out.horizon = spec.horizon;
  if (result.alarms.empty()) return out;
  const Alarm& alarm = result.alarms.front();
  out.alarm_time = alarm.time_index;
  out.trigger = alarm.report;
  out.false_alarm = alarm.time_index <= spec.change_time;
  out.delay = out.false_alarm ? 0 : alarm.time_index - spec.change_time;
  return out;
}

}  // namespace

absl::StatusOr<ThresholdFn> MakeThreshold(const DetectorConfig& config) {
  const ThresholdParams& p = config.thresholds;
  switch (config.kind) {
    case DetectorKind::kPrivate: {
      absl::StatusOr<PrivateThreshold> schedule = PrivateThreshold::Create(p);
      if (!schedule.ok()) return schedule.status();
      const int64_t first_active = schedule->FirstActiveTime();
      return ThresholdFn([schedule = *schedule, first_active](int64_t s, int64_t t) {
        return t < first_active ? kInfinity : schedule(s, t);
      });
    }
    case DetectorKind::kNonprivate: {
      absl::StatusOr<NonprivateThreshold> schedule =
          NonprivateThreshold::Create(p);
      if (!schedule.ok()) return schedule.status();
      return ThresholdFn(*schedule);
    }
    case DetectorKind::kUnivariate: {
      absl::StatusOr<UnivariateThreshold> schedule = UnivariateThreshold::Create(
          p.gamma, p.sigma, p.alpha, config.interval_length);
      if (!schedule.ok()) return schedule.status();
      // b_t does not depend on s; evaluate once per t.
      return ThresholdFn([schedule = *schedule, last_t = int64_t{-1},
                          last_b = 0.0](int64_t, int64_t t) mutable {
        if (t != last_t) {
          last_t = t;
          last_b = schedule(t);
        }
        return last_b;
      });
    }
  }
  return absl::InternalError("unknown detector kind");
}

absl::StatusOr<RunOutcome> RunScenario(const ScenarioSpec& spec,
                                       const DetectorConfig& config,
                                       uint64_t seed) {
  if (absl::Status st = spec.Validate(); !st.ok()) return st;
  const bool univariate_spec = spec.kind == ScenarioKind::kUnivariate;
  if (univariate_spec != (config.kind == DetectorKind::kUnivariate)) {
    return absl::InvalidArgumentError(
        "univariate detectors need univariate scenarios and vice versa");
  }
  absl::StatusOr<ThresholdFn> threshold = MakeThreshold(config);
  if (!threshold.ok()) return threshold.status();

  StreamGenerator generator(spec, DataSeed(seed));
  const CounterRng noise = PrivacyNoise(seed, config.zero_noise);
  const Retention retention = RetentionFor(config.scan);
  RunOptions options;
  options.horizon = spec.horizon;
  absl::StatusOr<DetectionResult> result;

  switch (config.kind) {
    case DetectorKind::kUnivariate: {
      absl::StatusOr<UnivariateChannel> channel = UnivariateChannel::Create(
          config.thresholds.alpha, config.interval_length);
      if (!channel.ok()) return channel.status();
      auto next = [&]() -> absl::StatusOr<std::optional<UnivariateObservation>> {
        const RawObservation raw = generator.Next();
        return UnivariateObservation{
            raw.time_index,
            PrivatizeUnivariate(raw.y, raw.time_index, *channel, noise)};
      };
      result = RunDetector(next, UnivariateEngine(retention), *threshold, options);
      break;
    }
    case DetectorKind::kPrivate: {
      absl::StatusOr<BinPartition> partition = BinPartition::Create(
          spec.lower, spec.upper, config.thresholds.bin_width);
      if (!partition.ok()) return partition.status();
      absl::StatusOr<PrivacyParams> params = PrivacyParams::Create(
          config.thresholds.alpha, config.thresholds.truncation_m);
      if (!params.ok()) return params.status();
      const RegressionChannel channel{*partition, *params};
      auto next = [&]() -> absl::StatusOr<std::optional<PrivateObservation>> {
        absl::StatusOr<PrivateObservation> obs =
            PrivatizeRegression(generator.Next(), channel, noise);
        if (!obs.ok()) return obs.status();
        return std::optional<PrivateObservation>(*std::move(obs));
      };
      result = RunDetector(
          next, PrivateRegressionEngine(partition->num_bins(), retention),
          *threshold, options);
      break;
    }
    case DetectorKind::kNonprivate: {
      absl::StatusOr<BinPartition> partition = BinPartition::Create(
          spec.lower, spec.upper, config.thresholds.bin_width);
      if (!partition.ok()) return partition.status();
      auto next = [&]() -> absl::StatusOr<std::optional<RawObservation>> {
        return std::optional<RawObservation>(generator.Next());
      };
      result = RunDetector(next, NonprivateRegressionEngine(*partition, retention),
                           *threshold, options);
      break;
    }
  }
  if (!result.ok()) return result.status();
  return MakeOutcome(spec, seed, *result);
}

uint64_t DataSeed(uint64_t seed) {
  return CounterRng(seed).Fork(kDataStream).key();
}

CounterRng PrivacyNoise(uint64_t seed, bool zero_noise) {
  return zero_noise ? CounterRng::ZeroNoise() : CounterRng(seed).Fork(kPrivacyStream);
}

uint64_t ReplicationSeed(uint64_t master_seed, int64_t rep) {
  return CounterRng(master_seed).Bits(static_cast<uint64_t>(rep), 0x5eed);
}

std::vector<RunOutcome> RunReplications(const ScenarioSpec& spec,
                                        const DetectorConfig& config,
                                        int64_t n_reps, uint64_t master_seed,
                                        int parallelism) {
  std::vector<RunOutcome> outcomes(static_cast<size_t>(std::max<int64_t>(n_reps, 0)));
  auto run_one = [&](int64_t rep) {
    const uint64_t seed = ReplicationSeed(master_seed, rep);
    absl::StatusOr<RunOutcome> out = RunScenario(spec, config, seed);
    if (out.ok()) {
      outcomes[rep] = *std::move(out);
    } else {
      outcomes[rep].seed = seed;
      outcomes[rep].change_time = spec.change_time;
      outcomes[rep].horizon = spec.horizon;
      outcomes[rep].status = out.status();
    }
  };
  if (parallelism <= 1) {
    for (int64_t rep = 0; rep < n_reps; ++rep) run_one(rep);
    return outcomes;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::jthread> workers;
  for (int w = 0; w < parallelism; ++w) {
    workers.emplace_back([&] {
      for (int64_t rep = next++; rep < n_reps; rep = next++) run_one(rep);
    });
  }
  workers.clear();  // joins
  return outcomes;
}

}  // namespace privcusum
