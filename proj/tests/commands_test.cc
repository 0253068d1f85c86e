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

#include "commands.h"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "config.h"
#include "csv.h"
#include "gtest/gtest.h"
#include "privcusum/pipeline.h"
#include "privcusum/privacy.h"
#include "privcusum/scenario.h"
#include "test_util.h"

namespace privcusum::cli {
namespace {

using ::privcusum::testing::Unwrap;

std::string TempPath(const std::string& name) {
  return absl::StrCat(::testing::TempDir(), "/privcusum_", name);
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string WriteConfig(const std::string& name, const ExperimentConfig& config) {
  const std::string path = TempPath(name + ".json");
  WriteText(path, SerializeConfig(config));
  return path;
}

// Raw stream drawn exactly as RunScenario draws it for `seed`.
std::string WriteRawStream(const std::string& name, const ScenarioSpec& spec,
                           uint64_t seed) {
  StreamGenerator gen(spec, DataSeed(seed));
  std::vector<RawObservation> rows;
  for (int64_t t = 1; t <= spec.horizon; ++t) rows.push_back(gen.Next());
  std::ostringstream out;
  WriteRawCsv(out, spec.dim(), rows);
  if (spec.kind == ScenarioKind::kUnivariate) {
    // Univariate raw files carry only t and y.
    std::string text = "t,y\n";
    for (const RawObservation& r : rows) {
      absl::StrAppend(&text, r.time_index, ",", FormatDouble(r.y), "\n");
    }
    const std::string path = TempPath(name + ".csv");
    WriteText(path, text);
    return path;
  }
  const std::string path = TempPath(name + ".csv");
  WriteText(path, out.str());
  return path;
}

ExperimentConfig UnivariateConfig() {
  ExperimentConfig c;
  c.scenario.kind = "univariate";
  c.scenario.pre_mean = 0.0;
  c.scenario.post_mean = 2.0;
  c.scenario.change_time_steps = 150;
  c.scenario.sigma_response_units = 0.5;
  c.scenario.horizon_steps = 500;
  c.detector.kind = "univariate";
  c.privacy.alpha = 2.0;
  c.n_reps = 4;
  c.master_seed = 5;
  return c;
}

ExperimentConfig RegressionConfig() {
  ExperimentConfig c;
  c.scenario.kind = "regression";
  c.scenario.domain_lower = {0.0};
  c.scenario.domain_upper = {1.0};
  c.scenario.pre_function.offset = -1.0;
  c.scenario.post_function.offset = 1.0;
  c.scenario.change_time_steps = 100;
  c.scenario.sigma_response_units = 0.1;
  c.scenario.horizon_steps = 40;
  c.detector.kind = "private";
  c.privacy.alpha = 0.5;
  c.privacy.truncation_m_response_units = 1.5;
  c.thresholds.bin_width_x_units = 0.5;
  return c;
}

std::string AlarmLine(const std::string& output) {
  for (absl::string_view line : absl::StrSplit(output, '\n')) {
    if (absl::StartsWith(line, "alarm: ")) return std::string(line.substr(7));
  }
  return "";
}

TEST(CommandsTest, PrivatizeThenDetectMatchesPipeline) {
  const ExperimentConfig config = UnivariateConfig();
  const std::string config_path = WriteConfig("uni", config);
  const ScenarioSpec spec = Unwrap(BuildScenario(config));
  constexpr uint64_t kSeed = 31;
  const std::string raw = WriteRawStream("uni_raw", spec, kSeed);
  const std::string priv = TempPath("uni_priv.csv");
  std::ostringstream log;
  ASSERT_TRUE(RunPrivatize({config_path, raw, priv, kSeed}, log).ok()) << log.str();

  std::ostringstream out;
  ASSERT_TRUE(RunDetect({config_path, priv, "", 0}, out, log).ok());
  const ResolvedDetector resolved = Unwrap(ResolveDetector(config, spec));
  const RunOutcome expected = Unwrap(RunScenario(spec, resolved.detector, kSeed));
  ASSERT_TRUE(expected.alarm_time.has_value());
  EXPECT_EQ(AlarmLine(out.str()), absl::StrCat(*expected.alarm_time));
  // Without restart the stream is consumed up to the first alarm.
  EXPECT_NE(out.str().find(absl::StrCat("observations: ", *expected.alarm_time)),
            std::string::npos);

  // Raw univariate input is privatized with the given seed.
  std::ostringstream direct;
  ASSERT_TRUE(RunDetect({config_path, raw, "", kSeed}, direct, log).ok());
  EXPECT_EQ(direct.str(), out.str());
}

TEST(CommandsTest, PrivatizeRegressionMatchesLibraryChannel) {
  const ExperimentConfig config = RegressionConfig();
  const std::string config_path = WriteConfig("reg", config);
  const ScenarioSpec spec = Unwrap(BuildScenario(config));
  const std::string raw = WriteRawStream("reg_raw", spec, 8);
  const std::string priv = TempPath("reg_priv.csv");
  std::ostringstream log;
  ASSERT_TRUE(RunPrivatize({config_path, raw, priv, 8}, log).ok()) << log.str();

  std::ifstream in(priv);
  const PrivateTable table = Unwrap(ReadPrivateCsv(in));
  EXPECT_EQ(table.num_bins, 2);
  EXPECT_EQ(table.metadata.seed, 8u);
  ASSERT_EQ(table.rows.size(), 40u);
  const RegressionChannel channel{Unwrap(BinPartition::UnitCube(1, 0.5)),
                                  Unwrap(PrivacyParams::Create(0.5, 1.5))};
  StreamGenerator gen(spec, DataSeed(8));
  for (const PrivateObservation& row : table.rows) {
    const PrivateObservation want =
        Unwrap(PrivatizeRegression(gen.Next(), channel, PrivacyNoise(8)));
    EXPECT_EQ(row.w, want.w);
    EXPECT_EQ(row.z, want.z);
  }
}

TEST(CommandsTest, ZeroNoisePrivatizationIsOneHot) {
  ExperimentConfig config = RegressionConfig();
  config.detector.zero_noise = true;
  config.thresholds.bin_width_x_units = 0.25;
  const std::string config_path = WriteConfig("zero", config);
  const std::string raw = TempPath("zero_raw.csv");
  WriteText(raw, "t,x1,y\n1,0.1,0.5\n2,0.6,3\n3,0.9,-1\n");
  const std::string priv = TempPath("zero_priv.csv");
  std::ostringstream log;
  ASSERT_TRUE(RunPrivatize({config_path, raw, priv, 1}, log).ok()) << log.str();
  std::ifstream in(priv);
  const PrivateTable table = Unwrap(ReadPrivateCsv(in));
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_EQ(table.rows[0].w, Eigen::Vector4d(1, 0, 0, 0));
  EXPECT_EQ(table.rows[0].z, Eigen::Vector4d(0.5, 0, 0, 0));
  EXPECT_EQ(table.rows[1].w, Eigen::Vector4d(0, 0, 1, 0));
  EXPECT_EQ(table.rows[1].z, Eigen::Vector4d(0, 0, 1.5, 0));  // clamped to M
  EXPECT_EQ(table.rows[2].z, Eigen::Vector4d(0, 0, 0, -1));
}

TEST(CommandsTest, PrivatizeReportsOffendingRow) {
  const std::string config_path = WriteConfig("oor", RegressionConfig());
  const std::string raw = TempPath("oor_raw.csv");
  WriteText(raw, "t,x1,y\n1,0.1,0.5\n2,1.6,3\n");
  std::ostringstream log;
  const absl::Status st =
      RunPrivatize({config_path, raw, TempPath("oor_priv.csv"), 1}, log);
  EXPECT_EQ(st.code(), absl::StatusCode::kOutOfRange);
  EXPECT_NE(st.message().find("t=2"), std::string::npos) << st;
  EXPECT_EQ(ExitCodeFor(st), 1);
}

TEST(CommandsTest, DetectRejectsMismatchedBins) {
  const ExperimentConfig config = RegressionConfig();
  const std::string config_path = WriteConfig("bins", config);
  const ScenarioSpec spec = Unwrap(BuildScenario(config));
  const std::string raw = WriteRawStream("bins_raw", spec, 2);
  const std::string priv = TempPath("bins_priv.csv");
  std::ostringstream log;
  ASSERT_TRUE(RunPrivatize({config_path, raw, priv, 2}, log).ok());
  ExperimentConfig finer = config;
  finer.thresholds.bin_width_x_units = 0.25;
  std::ostringstream out;
  const absl::Status st = RunDetect({WriteConfig("bins2", finer), priv, "", 0}, out, log);
  EXPECT_EQ(st.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(st.message().find("h"), std::string::npos);
}

TEST(CommandsTest, TraceHasOneRowPerStepAfterTheFirst) {
  const ExperimentConfig config = RegressionConfig();
  const std::string config_path = WriteConfig("trace", config);
  const ScenarioSpec spec = Unwrap(BuildScenario(config));
  const std::string raw = WriteRawStream("trace_raw", spec, 4);
  const std::string priv = TempPath("trace_priv.csv");
  const std::string trace = TempPath("trace.csv");
  std::ostringstream log;
  ASSERT_TRUE(RunPrivatize({config_path, raw, priv, 4}, log).ok());
  std::ostringstream out;
  ASSERT_TRUE(RunDetect({config_path, priv, trace, 0}, out, log).ok());
  EXPECT_NE(out.str().find("alarm: none"), std::string::npos);
  const std::vector<std::string> lines =
      absl::StrSplit(ReadText(trace), '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 1u + 39u);
  EXPECT_EQ(lines[0], "t,max_statistic,min_active_threshold");
  EXPECT_TRUE(absl::StartsWith(lines[1], "2,"));
  EXPECT_TRUE(absl::EndsWith(lines[1], ",inf"));
}

TEST(CommandsTest, ExperimentIsByteDeterministic) {
  ExperimentConfig config = UnivariateConfig();
  config.scenario.horizon_steps = 300;
  config.sweep = SweepSection{"kappa", {1.0, 2.0, 4.0}};
  const std::string config_path = WriteConfig("exp", config);
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const std::string summary = TempPath(absl::StrCat("summary", run, ".csv"));
    const std::string prefix = TempPath(absl::StrCat("plot", run));
    std::ostringstream out;
    std::ostringstream log;
    ASSERT_TRUE(RunExperiment({config_path, summary, prefix}, out, log).ok())
        << log.str();
    const std::string text = ReadText(summary) + ReadText(prefix + "_delay.dat") +
                             ReadText(prefix + "_false_alarm.dat");
    if (run == 0) {
      first = text;
      const std::vector<std::string> rows =
          absl::StrSplit(ReadText(summary), '\n', absl::SkipEmpty());
      ASSERT_EQ(rows.size(), 4u);
      EXPECT_TRUE(absl::StartsWith(rows[0], "parameter,value,runs,errors,horizon,"));
      EXPECT_TRUE(absl::StartsWith(rows[1], "kappa,1,4,0,300,"));
    } else {
      EXPECT_EQ(text, first);
    }
  }
}

TEST(CommandsTest, CalibratePrintsConstants) {
  ExperimentConfig config = UnivariateConfig();
  config.scenario.horizon_steps = 400;
  config.sweep = SweepSection{"kappa", {1.0, 2.0}};
  const std::string config_path = WriteConfig("cal", config);
  std::ostringstream out;
  std::ostringstream log;
  ASSERT_TRUE(RunCalibrate({config_path, ""}, out, log).ok()) << log.str();
  EXPECT_NE(out.str().find("c_snr: "), std::string::npos);
  EXPECT_NE(out.str().find("c_eps: "), std::string::npos);
}

TEST(CommandsTest, AuditReportsNoViolations) {
  std::ostringstream out;
  AuditOptions options;
  options.alpha = 0.5;
  options.trials = 2000;
  ASSERT_TRUE(RunAudit(options, out).ok());
  const std::vector<std::string> lines =
      absl::StrSplit(out.str(), '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_TRUE(absl::StartsWith(lines[0], "channel=regression alpha=0.5 trials=2000"));
  EXPECT_TRUE(absl::EndsWith(lines[0], "violations=0"));
  EXPECT_TRUE(absl::StartsWith(lines[1], "channel=univariate"));
  options.channel = "histogram";
  EXPECT_FALSE(RunAudit(options, out).ok());
}

TEST(CommandsTest, MissingFilesMapToExitOne) {
  std::ostringstream out;
  std::ostringstream log;
  const absl::Status st = RunDetect({"/nonexistent.json", "x.csv", "", 0}, out, log);
  EXPECT_EQ(st.code(), absl::StatusCode::kNotFound);
  EXPECT_EQ(ExitCodeFor(st), 1);
}

TEST(CommandsTest, ExitCodes) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("")), 1);
  EXPECT_EQ(ExitCodeFor(absl::OutOfRangeError("")), 1);
  EXPECT_EQ(ExitCodeFor(absl::FailedPreconditionError("")), 1);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("")), 2);
  EXPECT_EQ(ExitCodeFor(absl::UnavailableError("")), 2);
}

}  // namespace
}  // namespace privcusum::cli
