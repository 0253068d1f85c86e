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

#ifndef PRIVCUSUM_TOOLS_COMMANDS_H_
#define PRIVCUSUM_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "absl/status/status.h"

namespace privcusum::cli {

// Process exit code for a command status: 0 success, 1 validation error
// (bad input, config or arguments), 2 runtime error.
int ExitCodeFor(const absl::Status& status);

struct PrivatizeOptions {
  std::string config_path;
  std::string input_path;
  std::string output_path;
  uint64_t seed = 0;
};

// Raw CSV -> privatized CSV. Noise is the run seed's privatization stream,
// so a file privatized with seed S matches an in-process run with seed S.
absl::Status RunPrivatize(const PrivatizeOptions& options, std::ostream& log);

struct DetectOptions {
  std::string config_path;
  std::string input_path;
  std::string trace_path;  // empty: no trace
  // Privatization seed for raw univariate input.
  uint64_t seed = 0;
};

// Prints `alarm: <t>` and `trigger: s=.. t=.. statistic=.. threshold=..`
// per alarm, or `alarm: none`. The trace CSV has one row per step t >= 2:
// `t,max_statistic,min_active_threshold`.
absl::Status RunDetect(const DetectOptions& options, std::ostream& out,
                       std::ostream& log);

struct ExperimentOptions {
  std::string config_path;
  std::string summary_path;  // overrides output.summary_csv when set
  std::string plot_prefix;   // overrides output.plot_data_prefix when set
};

// One summary row per sweep point plus `<prefix>_delay.dat` and
// `<prefix>_false_alarm.dat` plot data.
absl::Status RunExperiment(const ExperimentOptions& options, std::ostream& out,
                           std::ostream& log);

struct CalibrateOptions {
  std::string config_path;
  std::string output_path;  // empty: table on stdout only
};

// Empirical C_SNR / C_eps estimates across the config's sweep points.
absl::Status RunCalibrate(const CalibrateOptions& options, std::ostream& out,
                          std::ostream& log);

struct AuditOptions {
  std::string channel = "both";  // regression | univariate | both
  double alpha = 1.0;
  int64_t trials = 10000;
  uint64_t seed = 1;
  int dim = 1;
  double bin_width = 0.25;
  double truncation_m = 1.0;
  double interval_length = 1.0;
  double tolerance = 1e-12;
};

// Randomized privacy-loss audit. A loss above alpha + tolerance is a runtime
// error.
absl::Status RunAudit(const AuditOptions& options, std::ostream& out);

}  // namespace privcusum::cli

#endif  // PRIVCUSUM_TOOLS_COMMANDS_H_
