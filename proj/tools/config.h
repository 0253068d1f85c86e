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

#ifndef PRIVCUSUM_TOOLS_CONFIG_H_
#define PRIVCUSUM_TOOLS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privcusum/pipeline.h"
#include "privcusum/scenario.h"

namespace privcusum::cli {

struct FunctionConfig {
  double offset = 0.0;
  double height = 0.0;
  std::vector<double> center;
  double radius = 1.0;

  bool operator==(const FunctionConfig&) const = default;
};

struct ScenarioConfig {
  std::string kind = "univariate";  // univariate | regression
  std::vector<double> domain_lower = {0.0};
  std::vector<double> domain_upper = {1.0};
  std::string x_law = "uniform_box";  // uniform_box | uniform_ball | bin_weighted
  double ball_radius = 1.0;
  double weight_bin_width = 1.0;
  std::vector<double> bin_weights;
  FunctionConfig pre_function;
  FunctionConfig post_function;
  double pre_mean = 0.0;
  double post_mean = 1.0;
  std::optional<int64_t> change_time_steps;  // empty: no change
  std::string noise = "gaussian";             // gaussian | uniform
  double sigma_response_units = 1.0;
  int64_t horizon_steps = 1000;

  bool operator==(const ScenarioConfig&) const = default;
};

struct DetectorSection {
  std::string kind = "univariate";  // private | nonprivate | univariate
  std::string scan = "full";        // full | dyadic
  bool restart = false;
  bool zero_noise = false;

  bool operator==(const DetectorSection&) const = default;
};

struct PrivacySection {
  double alpha = 1.0;
  double truncation_m_response_units = 1.0;
  double interval_length_response_units = 1.0;

  bool operator==(const PrivacySection&) const = default;
};

// Unset entries are derived from the scenario.
struct ThresholdSection {
  double gamma = 0.05;
  double bin_width_x_units = 0.25;
  std::optional<double> m0_bound_response_units;
  std::optional<double> sigma_response_units;
  std::optional<double> c_lip_response_per_x_unit;
  std::optional<double> c_min;
  double c_snr = 1.0;
  double c_eps = 1.0;
  double c_d = 1.0;

  bool operator==(const ThresholdSection&) const = default;
};

struct SweepSection {
  std::string parameter;  // alpha | kappa | bin_width | change_time
  std::vector<double> values;

  bool operator==(const SweepSection&) const = default;
};

struct OutputSection {
  std::string summary_csv = "summary.csv";
  std::string plot_data_prefix = "plot";

  bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  DetectorSection detector;
  PrivacySection privacy;
  ThresholdSection thresholds;
  int64_t n_reps = 100;
  uint64_t master_seed = 1;
  int parallelism = 1;
  std::optional<SweepSection> sweep;
  OutputSection output;

  bool operator==(const ExperimentConfig&) const = default;
};

absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);
std::string SerializeConfig(const ExperimentConfig& config);

// Returns a copy with one swept parameter set.
absl::StatusOr<ExperimentConfig> ApplySweepValue(const ExperimentConfig& config,
                                                 const std::string& parameter,
                                                 double value);

absl::StatusOr<ScenarioSpec> BuildScenario(const ExperimentConfig& config);

struct ResolvedDetector {
  DetectorConfig detector;
  bool c_min_estimated = false;
  // SNR ratio (C_SNR from the config) when the change time is finite.
  std::optional<double> snr_ratio;
  std::vector<std::string> warnings;
};

// Fills derived threshold inputs and runs the cross-field checks: a private
// detector needs M >= M1(M0, sigma, h). An unmet SNR condition is a warning.
absl::StatusOr<ResolvedDetector> ResolveDetector(const ExperimentConfig& config,
                                                 const ScenarioSpec& spec);

absl::StatusOr<DetectorKind> ParseDetectorKind(const std::string& name);

}  // namespace privcusum::cli

#endif  // PRIVCUSUM_TOOLS_CONFIG_H_
