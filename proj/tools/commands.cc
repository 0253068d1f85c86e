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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "config.h"
#include "csv.h"
#include "privcusum/cusum.h"
#include "privcusum/detector.h"
#include "privcusum/metrics.h"
#include "privcusum/partition.h"
#include "privcusum/pipeline.h"
#include "privcusum/privacy.h"
#include "privcusum/thresholds.h"

namespace privcusum::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << content;
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::Status Annotate(const absl::Status& status, absl::string_view context) {
  return absl::Status(status.code(), absl::StrCat(context, ": ", status.message()));
}

// Config, scenario and resolved detector in one place.
struct Setup {
  ExperimentConfig config;
  ScenarioSpec spec;
  ResolvedDetector resolved;
};

absl::StatusOr<Setup> LoadSetup(const ExperimentConfig& config, std::ostream& log) {
  Setup setup{config, {}, {}};
  absl::StatusOr<ScenarioSpec> spec = BuildScenario(config);
  if (!spec.ok()) return spec.status();
  setup.spec = *std::move(spec);
  absl::StatusOr<ResolvedDetector> resolved = ResolveDetector(config, setup.spec);
  if (!resolved.ok()) return resolved.status();
  setup.resolved = *std::move(resolved);
  for (const std::string& w : setup.resolved.warnings) log << "warning: " << w << '\n';
  return setup;
}

absl::StatusOr<Setup> LoadSetup(const std::string& config_path, std::ostream& log) {
  absl::StatusOr<ExperimentConfig> config = LoadConfig(config_path);
  if (!config.ok()) return config.status();
  return LoadSetup(*config, log);
}

absl::StatusOr<BinPartition> PartitionFor(const Setup& setup) {
  return BinPartition::Create(setup.spec.lower, setup.spec.upper,
                              setup.resolved.detector.thresholds.bin_width);
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Every privatized-stream parameter recorded in the file must agree with the
// config the detector is built from.
absl::Status CheckMetadata(const PrivateMetadata& meta, const Setup& setup,
                           bool univariate) {
  const DetectorConfig& d = setup.resolved.detector;
  auto mismatch = [](absl::string_view field, const std::string& file,
                     const std::string& config) {
    return absl::InvalidArgumentError(absl::StrCat(
        "privatized stream and config disagree on ", field, ": file has ", file,
        ", config has ", config));
  };
  const std::string expected_kind = univariate ? "univariate" : "regression";
  if (meta.kind != expected_kind) return mismatch("stream kind", meta.kind, expected_kind);
  if (meta.alpha != d.thresholds.alpha) {
    return mismatch("alpha", FormatDouble(meta.alpha), FormatDouble(d.thresholds.alpha));
  }
  if (univariate) {
    if (meta.interval_length != d.interval_length) {
      return mismatch("L", FormatDouble(meta.interval_length),
                      FormatDouble(d.interval_length));
    }
    return absl::OkStatus();
  }
  if (meta.h != d.thresholds.bin_width) {
    return mismatch("h", FormatDouble(meta.h), FormatDouble(d.thresholds.bin_width));
  }
  if (meta.m != d.thresholds.truncation_m) {
    return mismatch("M", FormatDouble(meta.m), FormatDouble(d.thresholds.truncation_m));
  }
  if (meta.lower != ToStd(setup.spec.lower) || meta.upper != ToStd(setup.spec.upper)) {
    return absl::InvalidArgumentError(
        "privatized stream and config disagree on the covariate domain");
  }
  return absl::OkStatus();
}

bool LooksPrivatized(const std::string& text) {
  const size_t first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text[first] == '#';
}

// Streams the rows of `rows` (converted by `convert`) into a detector.
template <typename Engine, typename Row, typename Convert>
absl::StatusOr<DetectionResult> DetectOver(const std::vector<Row>& rows,
                                           Convert convert, Engine engine,
                                           ThresholdFn threshold,
                                           const RunOptions& options) {
  size_t next_row = 0;
  auto source = [&]() -> absl::StatusOr<std::optional<typename Engine::Observation>> {
    if (next_row == rows.size()) return std::nullopt;
    return std::optional<typename Engine::Observation>(convert(rows[next_row++]));
  };
  return RunDetector(source, std::move(engine), std::move(threshold), options);
}

std::string CsvText(absl::string_view text) {
  return absl::StrCat("\"", absl::StrReplaceAll(text, {{"\"", "'"}, {"\n", " "}}),
                      "\"");
}

std::string OptionalDouble(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "nan";
}

std::optional<double> DelayBudget(const Setup& setup) {
  const ScenarioSpec& spec = setup.spec;
  if (spec.change_time == kNoChange || !(spec.kappa > 0.0)) return std::nullopt;
  const DetectorConfig& d = setup.resolved.detector;
  absl::StatusOr<double> order =
      DelayOrder(d.kind, spec.kappa, static_cast<double>(spec.change_time),
                 d.thresholds, d.interval_length);
  if (!order.ok()) return std::nullopt;
  const double constant = d.kind == DetectorKind::kUnivariate
                              ? setup.config.thresholds.c_d
                              : setup.config.thresholds.c_eps;
  return constant * *order;
}

struct SweepPoint {
  std::string parameter;
  double value = kNaN;
  absl::StatusOr<ExperimentConfig> config;
};

std::vector<SweepPoint> ExpandSweep(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  if (!config.sweep.has_value()) {
    points.push_back({"none", kNaN, config});
    return points;
  }
  for (double v : config.sweep->values) {
    points.push_back({config.sweep->parameter, v,
                      ApplySweepValue(config, config.sweep->parameter, v)});
  }
  return points;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kNotFound:
      return 1;
    default:
      return 2;
  }
}

absl::Status RunPrivatize(const PrivatizeOptions& options, std::ostream& log) {
  absl::StatusOr<Setup> setup = LoadSetup(options.config_path, log);
  if (!setup.ok()) return setup.status();
  absl::StatusOr<std::string> text = ReadFile(options.input_path);
  if (!text.ok()) return text.status();
  std::istringstream in(*text);
  absl::StatusOr<RawTable> raw = ReadRawCsv(in);
  if (!raw.ok()) return Annotate(raw.status(), options.input_path);

  const DetectorConfig& d = setup->resolved.detector;
  const CounterRng noise = PrivacyNoise(options.seed, d.zero_noise);
  PrivateMetadata meta;
  meta.alpha = d.thresholds.alpha;
  meta.seed = options.seed;
  meta.zero_noise = d.zero_noise;
  std::ostringstream out;

  if (d.kind == DetectorKind::kUnivariate) {
    if (raw->dim != 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "univariate config expects header 't,y', input has ", raw->dim,
          " covariate columns"));
    }
    absl::StatusOr<UnivariateChannel> channel =
        UnivariateChannel::Create(d.thresholds.alpha, d.interval_length);
    if (!channel.ok()) return channel.status();
    meta.kind = "univariate";
    meta.interval_length = d.interval_length;
    WritePrivateCsvHeader(out, meta, 0);
    for (const RawObservation& row : raw->rows) {
      PrivateObservation priv;
      priv.time_index = row.time_index;
      priv.z = Eigen::VectorXd::Constant(
          1, PrivatizeUnivariate(row.y, row.time_index, *channel, noise));
      WritePrivateCsvRow(out, priv);
    }
  } else {
    absl::StatusOr<BinPartition> partition = PartitionFor(*setup);
    if (!partition.ok()) return partition.status();
    if (raw->dim != partition->dim()) {
      return absl::InvalidArgumentError(
          absl::StrCat("input has ", raw->dim, " covariate columns, config domain has ",
                       partition->dim(), " dimensions"));
    }
    absl::StatusOr<PrivacyParams> params =
        PrivacyParams::Create(d.thresholds.alpha, d.thresholds.truncation_m);
    if (!params.ok()) return params.status();
    const RegressionChannel channel{*partition, *params};
    meta.kind = "regression";
    meta.h = d.thresholds.bin_width;
    meta.m = d.thresholds.truncation_m;
    meta.lower = ToStd(partition->lower());
    meta.upper = ToStd(partition->upper());
    WritePrivateCsvHeader(out, meta, partition->num_bins());
    for (size_t i = 0; i < raw->rows.size(); ++i) {
      absl::StatusOr<PrivateObservation> priv =
          PrivatizeRegression(raw->rows[i], channel, noise);
      if (!priv.ok()) {
        return Annotate(priv.status(),
                        absl::StrCat(options.input_path, ": data row ", i + 1,
                                     " (t=", raw->rows[i].time_index, ")"));
      }
      WritePrivateCsvRow(out, *priv);
    }
  }
  if (absl::Status st = WriteFile(options.output_path, out.str()); !st.ok()) return st;
  log << "privatized " << raw->rows.size() << " rows to " << options.output_path
      << '\n';
  return absl::OkStatus();
}

absl::Status RunDetect(const DetectOptions& options, std::ostream& out,
                       std::ostream& log) {
  absl::StatusOr<Setup> setup = LoadSetup(options.config_path, log);
  if (!setup.ok()) return setup.status();
  const DetectorConfig& d = setup->resolved.detector;
  absl::StatusOr<ThresholdFn> threshold = MakeThreshold(d);
  if (!threshold.ok()) return threshold.status();
  absl::StatusOr<std::string> text = ReadFile(options.input_path);
  if (!text.ok()) return text.status();

  std::ofstream trace;
  RunOptions run;
  run.restart = setup->config.detector.restart;
  if (!options.trace_path.empty()) {
    trace.open(options.trace_path, std::ios::binary | std::ios::trunc);
    if (!trace) {
      return absl::UnavailableError(absl::StrCat("cannot write ", options.trace_path));
    }
    trace << "t,max_statistic,min_active_threshold\n";
    run.evaluate_inactive = true;
    run.on_step = [&trace](const StepSummary& step) {
      if (step.t < 2) return;
      trace << step.time_index << ',' << FormatDouble(step.max_statistic) << ','
            << FormatDouble(step.min_active_threshold) << '\n';
    };
  }
  const Retention retention = RetentionFor(d.scan);
  absl::StatusOr<DetectionResult> result;
  std::istringstream in(*text);

  switch (d.kind) {
    case DetectorKind::kPrivate: {
      absl::StatusOr<PrivateTable> table = ReadPrivateCsv(in);
      if (!table.ok()) return Annotate(table.status(), options.input_path);
      if (absl::Status st = CheckMetadata(table->metadata, *setup, false); !st.ok()) {
        return st;
      }
      absl::StatusOr<BinPartition> partition = PartitionFor(*setup);
      if (!partition.ok()) return partition.status();
      if (table->num_bins != partition->num_bins()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "bin count mismatch: file has N_h=", table->num_bins,
            ", config partition has N_h=", partition->num_bins()));
      }
      result = DetectOver(
          table->rows, [](const PrivateObservation& o) { return o; },
          PrivateRegressionEngine(partition->num_bins(), retention), *threshold, run);
      break;
    }
    case DetectorKind::kNonprivate: {
      absl::StatusOr<RawTable> table = ReadRawCsv(in);
      if (!table.ok()) return Annotate(table.status(), options.input_path);
      absl::StatusOr<BinPartition> partition = PartitionFor(*setup);
      if (!partition.ok()) return partition.status();
      if (table->dim != partition->dim()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "input has ", table->dim, " covariate columns, config domain has ",
            partition->dim(), " dimensions"));
      }
      result = DetectOver(
          table->rows, [](const RawObservation& o) { return o; },
          NonprivateRegressionEngine(*partition, retention), *threshold, run);
      break;
    }
    case DetectorKind::kUnivariate: {
      if (LooksPrivatized(*text)) {
        absl::StatusOr<PrivateTable> table = ReadPrivateCsv(in);
        if (!table.ok()) return Annotate(table.status(), options.input_path);
        if (absl::Status st = CheckMetadata(table->metadata, *setup, true); !st.ok()) {
          return st;
        }
        result = DetectOver(
            table->rows,
            [](const PrivateObservation& o) {
              return UnivariateObservation{o.time_index, o.z[0]};
            },
            UnivariateEngine(retention), *threshold, run);
      } else {
        absl::StatusOr<RawTable> table = ReadRawCsv(in);
        if (!table.ok()) return Annotate(table.status(), options.input_path);
        if (table->dim != 0) {
          return absl::InvalidArgumentError(
              "univariate detection expects a raw 't,y' or privatized 't,z' file");
        }
        absl::StatusOr<UnivariateChannel> channel =
            UnivariateChannel::Create(d.thresholds.alpha, d.interval_length);
        if (!channel.ok()) return channel.status();
        const CounterRng noise = PrivacyNoise(options.seed, d.zero_noise);
        result = DetectOver(
            table->rows,
            [&](const RawObservation& o) {
              return UnivariateObservation{
                  o.time_index, PrivatizeUnivariate(o.y, o.time_index, *channel, noise)};
            },
            UnivariateEngine(retention), *threshold, run);
      }
      break;
    }
  }
  if (!result.ok()) return result.status();
  if (trace.is_open()) {
    trace.close();
    if (!trace) {
      return absl::UnavailableError(absl::StrCat("failed writing ", options.trace_path));
    }
  }
  out << "observations: " << result->observations << '\n';
  if (result->alarms.empty()) {
    out << "alarm: none\n";
    return absl::OkStatus();
  }
  for (const Alarm& alarm : result->alarms) {
    out << "alarm: " << alarm.time_index << '\n'
        << "trigger: s=" << alarm.origin + alarm.report.s
        << " t=" << alarm.origin + alarm.report.t
        << " statistic=" << FormatDouble(alarm.report.statistic)
        << " threshold=" << FormatDouble(alarm.report.threshold) << '\n';
  }
  return absl::OkStatus();
}

absl::Status RunExperiment(const ExperimentOptions& options, std::ostream& out,
                           std::ostream& log) {
  absl::StatusOr<ExperimentConfig> base = LoadConfig(options.config_path);
  if (!base.ok()) return base.status();
  const std::string summary_path =
      options.summary_path.empty() ? base->output.summary_csv : options.summary_path;
  const std::string plot_prefix =
      options.plot_prefix.empty() ? base->output.plot_data_prefix : options.plot_prefix;

  struct Row {
    SweepPoint point;
    std::optional<Summary> summary;
    std::optional<double> budget;
    std::optional<double> snr_ratio;
    double c_min = kNaN;
    bool c_min_estimated = false;
    absl::Status status;
  };
  std::vector<Row> rows;
  for (SweepPoint& point : ExpandSweep(*base)) {
    Row row{std::move(point), std::nullopt, std::nullopt, std::nullopt, kNaN, false,
            absl::OkStatus()};
    absl::StatusOr<Setup> setup =
        row.point.config.ok() ? LoadSetup(*row.point.config, log)
                              : absl::StatusOr<Setup>(row.point.config.status());
    if (!setup.ok()) {
      row.status = setup.status();
      log << "sweep point " << row.point.parameter << "="
          << FormatDouble(row.point.value) << " failed: " << row.status << '\n';
      rows.push_back(std::move(row));
      continue;
    }
    const std::vector<RunOutcome> outcomes =
        RunReplications(setup->spec, setup->resolved.detector, setup->config.n_reps,
                        setup->config.master_seed, setup->config.parallelism);
    row.budget = DelayBudget(*setup);
    row.summary = Summarize(outcomes, setup->config.thresholds.gamma, row.budget);
    row.snr_ratio = setup->resolved.snr_ratio;
    row.c_min = setup->resolved.detector.thresholds.c_min;
    row.c_min_estimated = setup->resolved.c_min_estimated;
    for (const RunOutcome& o : outcomes) {
      if (!o.status.ok()) {
        row.status = o.status;
        break;
      }
    }
    rows.push_back(std::move(row));
  }

  // Log-log slope of the median delay against the swept parameter.
  double slope = kNaN;
  if (base->sweep.has_value()) {
    std::vector<double> xs;
    std::vector<double> ys;
    bool usable = true;
    for (const Row& row : rows) {
      if (!row.summary.has_value()) {
        usable = false;
        break;
      }
      xs.push_back(row.point.value);
      ys.push_back(row.summary->delay_median);
    }
    if (usable && xs.size() >= 3) {
      absl::StatusOr<ScalingFit> fit = FitScaling(xs, ys);
      if (fit.ok()) slope = fit->slope;
    }
  }

  std::ostringstream csv;
  csv << "parameter,value,runs,errors,horizon,false_alarm_rate,false_alarm_se,"
         "false_alarm_within_gamma,detection_rate,delay_mean,delay_median,"
         "delay_q10,delay_q90,delay_budget,over_budget_rate,snr_ratio,c_min,"
         "c_min_estimated,delay_slope,status\n";
  std::ostringstream delay_dat;
  std::ostringstream fa_dat;
  delay_dat << "# x median_delay error  (error = (q90 - q10) / 2)\n";
  fa_dat << "# x false_alarm_rate standard_error\n";
  bool any_ok = false;
  for (const Row& row : rows) {
    csv << row.point.parameter << ',' << FormatDouble(row.point.value) << ',';
    if (row.summary.has_value()) {
      any_ok = true;
      const Summary& s = *row.summary;
      csv << s.runs << ',' << s.errors << ',' << s.horizon << ','
          << FormatDouble(s.false_alarm_rate) << ',' << FormatDouble(s.false_alarm_se)
          << ',' << (s.false_alarm_within_gamma ? 1 : 0) << ','
          << FormatDouble(s.detection_rate) << ',' << FormatDouble(s.delay_mean) << ','
          << FormatDouble(s.delay_median) << ',' << FormatDouble(s.delay_q10) << ','
          << FormatDouble(s.delay_q90) << ',' << OptionalDouble(row.budget) << ','
          << FormatDouble(s.over_budget_rate) << ',' << OptionalDouble(row.snr_ratio)
          << ',' << FormatDouble(row.c_min) << ',' << (row.c_min_estimated ? 1 : 0)
          << ',';
      const double x = std::isnan(row.point.value) ? 0.0 : row.point.value;
      delay_dat << FormatDouble(x) << ' ' << FormatDouble(s.delay_median) << ' '
                << FormatDouble((s.delay_q90 - s.delay_q10) / 2.0) << '\n';
      fa_dat << FormatDouble(x) << ' ' << FormatDouble(s.false_alarm_rate) << ' '
             << FormatDouble(s.false_alarm_se) << '\n';
    } else {
      csv << ",,,,,,,,,,,,,,,,,";
    }
    csv << FormatDouble(slope) << ','
        << CsvText(row.status.ok() ? "ok" : row.status.ToString()) << '\n';
  }
  if (absl::Status st = WriteFile(summary_path, csv.str()); !st.ok()) return st;
  if (!plot_prefix.empty()) {
    if (absl::Status st = WriteFile(plot_prefix + "_delay.dat", delay_dat.str());
        !st.ok()) {
      return st;
    }
    if (absl::Status st = WriteFile(plot_prefix + "_false_alarm.dat", fa_dat.str());
        !st.ok()) {
      return st;
    }
  }
  out << "sweep points: " << rows.size() << '\n'
      << "summary: " << summary_path << '\n'
      << "delay_slope: " << FormatDouble(slope) << '\n';
  if (!any_ok) {
    return absl::Status(rows.front().status.code(),
                        absl::StrCat("every sweep point failed; first: ",
                                     rows.front().status.message()));
  }
  return absl::OkStatus();
}

absl::Status RunCalibrate(const CalibrateOptions& options, std::ostream& out,
                          std::ostream& log) {
  absl::StatusOr<ExperimentConfig> base = LoadConfig(options.config_path);
  if (!base.ok()) return base.status();
  std::ostringstream csv;
  csv << "parameter,value,change_time,runs,detection_rate,false_alarm_rate,"
         "snr_unit_ratio,delay_order,delay_quantile,c_eps_hat,status\n";
  // C_SNR must exceed the unit-constant SNR ratio of every point where the
  // guarantee failed; C_eps must cover every point's (1 - gamma) delay quantile.
  double c_snr = 0.0;
  double c_eps = 0.0;
  int failing = 0;
  int usable = 0;
  for (SweepPoint& point : ExpandSweep(*base)) {
    csv << point.parameter << ',' << FormatDouble(point.value) << ',';
    absl::StatusOr<Setup> setup = point.config.ok()
                                      ? LoadSetup(*point.config, log)
                                      : absl::StatusOr<Setup>(point.config.status());
    absl::Status status = setup.ok() ? absl::OkStatus() : setup.status();
    if (status.ok() && setup->spec.change_time == kNoChange) {
      status = absl::InvalidArgumentError("calibration needs a finite change time");
    }
    if (!status.ok()) {
      csv << ",,,,,,,," << CsvText(status.ToString()) << '\n';
      log << "calibration point failed: " << status << '\n';
      continue;
    }
    const DetectorConfig& d = setup->resolved.detector;
    const double gamma = d.thresholds.gamma;
    const double delta = static_cast<double>(setup->spec.change_time);
    const std::vector<RunOutcome> outcomes =
        RunReplications(setup->spec, d, setup->config.n_reps,
                        setup->config.master_seed, setup->config.parallelism);
    const Summary summary = Summarize(outcomes, gamma);
    absl::StatusOr<SnrResult> snr =
        SnrCheck(d.kind, setup->spec.kappa, delta, d.thresholds, 1.0);
    absl::StatusOr<double> order = DelayOrder(d.kind, setup->spec.kappa, delta,
                                              d.thresholds, d.interval_length);
    if (!snr.ok() || !order.ok()) {
      const absl::Status st = snr.ok() ? order.status() : snr.status();
      csv << ",,,,,,,," << CsvText(st.ToString()) << '\n';
      continue;
    }
    std::vector<double> delays;
    for (const RunOutcome& o : outcomes) {
      if (!o.status.ok() || o.false_alarm) continue;
      delays.push_back(o.delay.has_value() ? static_cast<double>(*o.delay)
                                           : std::numeric_limits<double>::infinity());
    }
    const double quantile =
        delays.empty() ? kNaN : NearestRankQuantile(delays, 1.0 - gamma);
    const double c_eps_hat = quantile / *order;
    ++usable;
    const bool guaranteed =
        summary.detection_rate >= 1.0 - gamma && summary.false_alarm_rate <= gamma;
    if (!guaranteed) {
      ++failing;
      c_snr = std::max(c_snr, snr->ratio);
    }
    if (std::isfinite(c_eps_hat)) c_eps = std::max(c_eps, c_eps_hat);
    csv << setup->spec.change_time << ',' << summary.runs << ','
        << FormatDouble(summary.detection_rate) << ','
        << FormatDouble(summary.false_alarm_rate) << ',' << FormatDouble(snr->ratio)
        << ',' << FormatDouble(*order) << ',' << FormatDouble(quantile) << ','
        << FormatDouble(c_eps_hat) << ',' << CsvText("ok") << '\n';
  }
  out << csv.str();
  if (usable == 0) return absl::InvalidArgumentError("no usable calibration point");
  out << "c_snr: " << FormatDouble(c_snr) << "  (" << failing
      << " point(s) missed the guarantee; C_SNR must exceed their SNR ratio)\n"
      << "c_eps: " << FormatDouble(c_eps)
      << "  (covers the (1 - gamma) delay quantile at every point)\n";
  if (!options.output_path.empty()) return WriteFile(options.output_path, csv.str());
  return absl::OkStatus();
}

absl::Status RunAudit(const AuditOptions& options, std::ostream& out) {
  if (options.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  const bool regression = options.channel == "regression" || options.channel == "both";
  const bool univariate = options.channel == "univariate" || options.channel == "both";
  if (!regression && !univariate) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown channel '", options.channel, "'"));
  }
  int64_t violations = 0;
  auto report = [&](absl::string_view name, const AuditReport& r) {
    out << "channel=" << name << " alpha=" << FormatDouble(options.alpha)
        << " trials=" << r.trials << " max_loss=" << FormatDouble(r.max_loss)
        << " bound=" << FormatDouble(r.bound) << " violations=" << r.violations
        << '\n';
    violations += r.violations;
  };
  if (regression) {
    absl::StatusOr<BinPartition> partition =
        BinPartition::UnitCube(options.dim, options.bin_width);
    if (!partition.ok()) return partition.status();
    absl::StatusOr<PrivacyParams> params =
        PrivacyParams::Create(options.alpha, options.truncation_m);
    if (!params.ok()) return params.status();
    report("regression", RandomizedAudit(RegressionChannel{*partition, *params},
                                         options.trials, options.seed,
                                         options.tolerance));
  }
  if (univariate) {
    absl::StatusOr<UnivariateChannel> channel =
        UnivariateChannel::Create(options.alpha, options.interval_length);
    if (!channel.ok()) return channel.status();
    report("univariate",
           RandomizedAudit(*channel, options.trials, options.seed, options.tolerance));
  }
  if (violations > 0) {
    return absl::InternalError(
        absl::StrCat(violations, " privacy-loss violation(s) above alpha"));
  }
  return absl::OkStatus();
}

}  // namespace privcusum::cli
