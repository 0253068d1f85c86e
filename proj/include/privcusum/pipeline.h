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

#ifndef PRIVCUSUM_PIPELINE_H_
#define PRIVCUSUM_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privcusum/detector.h"
#include "privcusum/random.h"
#include "privcusum/scenario.h"
#include "privcusum/thresholds.h"

namespace privcusum {

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kUnivariate;
  ScanPolicy scan = ScanPolicy::kFull;
  // Privacy channel. truncation_m, bin_width and the remaining schedule
  // inputs are read from `thresholds`.
  double interval_length = 1.0;
  bool zero_noise = false;
  ThresholdParams thresholds;
};

// Outcome of one seeded run: first alarm only.
struct RunOutcome {
  uint64_t seed = 0;
  int64_t change_time = kNoChange;
  int64_t horizon = 0;
  std::optional<int64_t> alarm_time;
  // (alarm - change)_+; 0 for false alarms, empty when no alarm was raised.
  std::optional<int64_t> delay;
  bool false_alarm = false;
  std::optional<CusumReport> trigger;
  absl::Status status;
};

// Privatises (for private and univariate detectors) and runs the detector on
// a generated stream up to the scenario horizon.
absl::StatusOr<RunOutcome> RunScenario(const ScenarioSpec& spec,
                                       const DetectorConfig& config,
                                       uint64_t seed);

// Seed of replication `rep`, a pure function of (master_seed, rep).
// Seed streams used by RunScenario: the data generator seed and the
// privatization noise source derived from a run seed.
uint64_t DataSeed(uint64_t seed);
CounterRng PrivacyNoise(uint64_t seed, bool zero_noise = false);

uint64_t ReplicationSeed(uint64_t master_seed, int64_t rep);

// n_reps runs, returned in replication order. Errors are recorded per run.
// parallelism <= 1 runs serially; results do not depend on it.
std::vector<RunOutcome> RunReplications(const ScenarioSpec& spec,
                                        const DetectorConfig& config,
                                        int64_t n_reps, uint64_t master_seed,
                                        int parallelism = 1);

// Builds the threshold callable for a detector kind.
absl::StatusOr<ThresholdFn> MakeThreshold(const DetectorConfig& config);

}  // namespace privcusum

#endif  // PRIVCUSUM_PIPELINE_H_
