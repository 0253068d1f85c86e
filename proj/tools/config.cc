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

#include "config.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "privcusum/partition.h"
#include "privcusum/thresholds.h"

namespace privcusum::cli {
namespace {

using nlohmann::json;

// Size of the calibration prefix used to estimate c_min for covariate laws
// without a closed form.
constexpr int64_t kCalibrationPoints = 100000;

absl::Status CheckKeys(const json& obj, absl::string_view section,
                       std::initializer_list<absl::string_view> allowed) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("section '", section, "' must be an object"));
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (absl::string_view a : allowed) known = known || key == a;
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in section '", section, "'"));
    }
  }
  return absl::OkStatus();
}

template <typename T>
void Get(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) obj.at(key).get_to(out);
}

template <typename T>
void GetOptional(const json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
  } else {
    out = obj.at(key).get<T>();
  }
}

template <typename T>
json OptionalJson(const std::optional<T>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

absl::Status ReadFunction(const json& obj, absl::string_view name,
                          FunctionConfig& f) {
  if (absl::Status st = CheckKeys(obj, name, {"offset", "height", "center", "radius"});
      !st.ok()) {
    return st;
  }
  Get(obj, "offset", f.offset);
  Get(obj, "height", f.height);
  Get(obj, "center", f.center);
  Get(obj, "radius", f.radius);
  return absl::OkStatus();
}

json FunctionJson(const FunctionConfig& f) {
  return json{{"offset", f.offset},
              {"height", f.height},
              {"center", f.center},
              {"radius", f.radius}};
}

absl::StatusOr<ExperimentConfig> ParseJson(const json& root) {
  ExperimentConfig c;
  if (absl::Status st = CheckKeys(root, "root",
                                  {"scenario", "detector", "privacy", "thresholds",
                                   "n_reps", "master_seed", "parallelism", "sweep",
                                   "output"});
      !st.ok()) {
    return st;
  }
  if (root.contains("scenario")) {
    const json& s = root.at("scenario");
    if (absl::Status st = CheckKeys(
            s, "scenario",
            {"kind", "domain_lower", "domain_upper", "x_law", "ball_radius",
             "weight_bin_width", "bin_weights", "pre_function", "post_function",
             "pre_mean", "post_mean", "change_time_steps", "noise",
             "sigma_response_units", "horizon_steps"});
        !st.ok()) {
      return st;
    }
    ScenarioConfig& sc = c.scenario;
    Get(s, "kind", sc.kind);
    Get(s, "domain_lower", sc.domain_lower);
    Get(s, "domain_upper", sc.domain_upper);
    Get(s, "x_law", sc.x_law);
    Get(s, "ball_radius", sc.ball_radius);
    Get(s, "weight_bin_width", sc.weight_bin_width);
    Get(s, "bin_weights", sc.bin_weights);
    if (s.contains("pre_function")) {
      if (absl::Status st = ReadFunction(s.at("pre_function"), "pre_function",
                                         sc.pre_function);
          !st.ok()) {
        return st;
      }
    }
    if (s.contains("post_function")) {
      if (absl::Status st = ReadFunction(s.at("post_function"), "post_function",
                                         sc.post_function);
          !st.ok()) {
        return st;
      }
    }
    Get(s, "pre_mean", sc.pre_mean);
    Get(s, "post_mean", sc.post_mean);
    GetOptional(s, "change_time_steps", sc.change_time_steps);
    Get(s, "noise", sc.noise);
    Get(s, "sigma_response_units", sc.sigma_response_units);
    Get(s, "horizon_steps", sc.horizon_steps);
  }
  if (root.contains("detector")) {
    const json& d = root.at("detector");
    if (absl::Status st =
            CheckKeys(d, "detector", {"kind", "scan", "restart", "zero_noise"});
        !st.ok()) {
      return st;
    }
    Get(d, "kind", c.detector.kind);
    Get(d, "scan", c.detector.scan);
    Get(d, "restart", c.detector.restart);
    Get(d, "zero_noise", c.detector.zero_noise);
  }
  if (root.contains("privacy")) {
    const json& p = root.at("privacy");
    if (absl::Status st = CheckKeys(p, "privacy",
                                    {"alpha", "truncation_m_response_units",
                                     "interval_length_response_units"});
        !st.ok()) {
      return st;
    }
    Get(p, "alpha", c.privacy.alpha);
    Get(p, "truncation_m_response_units", c.privacy.truncation_m_response_units);
    Get(p, "interval_length_response_units",
        c.privacy.interval_length_response_units);
  }
  if (root.contains("thresholds")) {
    const json& t = root.at("thresholds");
    if (absl::Status st = CheckKeys(
            t, "thresholds",
            {"gamma", "bin_width_x_units", "m0_bound_response_units",
             "sigma_response_units", "c_lip_response_per_x_unit", "c_min", "c_snr",
             "c_eps", "c_d"});
        !st.ok()) {
      return st;
    }
    ThresholdSection& ts = c.thresholds;
    Get(t, "gamma", ts.gamma);
    Get(t, "bin_width_x_units", ts.bin_width_x_units);
    GetOptional(t, "m0_bound_response_units", ts.m0_bound_response_units);
    GetOptional(t, "sigma_response_units", ts.sigma_response_units);
    GetOptional(t, "c_lip_response_per_x_unit", ts.c_lip_response_per_x_unit);
    GetOptional(t, "c_min", ts.c_min);
    Get(t, "c_snr", ts.c_snr);
    Get(t, "c_eps", ts.c_eps);
    Get(t, "c_d", ts.c_d);
  }
  Get(root, "n_reps", c.n_reps);
  Get(root, "master_seed", c.master_seed);
  Get(root, "parallelism", c.parallelism);
  if (root.contains("sweep") && !root.at("sweep").is_null()) {
    const json& sw = root.at("sweep");
    if (absl::Status st = CheckKeys(sw, "sweep", {"parameter", "values"}); !st.ok()) {
      return st;
    }
    SweepSection sweep;
    Get(sw, "parameter", sweep.parameter);
    Get(sw, "values", sweep.values);
    c.sweep = sweep;
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    if (absl::Status st = CheckKeys(o, "output", {"summary_csv", "plot_data_prefix"});
        !st.ok()) {
      return st;
    }
    Get(o, "summary_csv", c.output.summary_csv);
    Get(o, "plot_data_prefix", c.output.plot_data_prefix);
  }
  if (c.n_reps < 1) return absl::InvalidArgumentError("n_reps must be >= 1");
  return c;
}

absl::StatusOr<FunctionConfig> ScaledPostFunction(const ScenarioConfig& s,
                                                  double factor) {
  const FunctionConfig& pre = s.pre_function;
  FunctionConfig post = s.post_function;
  if (pre.height != 0.0 && post.height != 0.0 &&
      (pre.center != post.center || pre.radius != post.radius)) {
    return absl::InvalidArgumentError(
        "kappa sweeps need pre and post functions of the same bump shape");
  }
  post.offset = pre.offset + (post.offset - pre.offset) * factor;
  post.height = pre.height + (post.height - pre.height) * factor;
  if (post.height != 0.0 && post.center.empty()) {
    post.center = pre.center;
    post.radius = pre.radius;
  }
  return post;
}

RegressionFunction ToFunction(const FunctionConfig& f) {
  Eigen::VectorXd center =
      Eigen::Map<const Eigen::VectorXd>(f.center.data(), f.center.size());
  return RegressionFunction{f.offset, f.height, std::move(center), f.radius};
}

}  // namespace

absl::StatusOr<DetectorKind> ParseDetectorKind(const std::string& name) {
  if (name == "private") return DetectorKind::kPrivate;
  if (name == "nonprivate") return DetectorKind::kNonprivate;
  if (name == "univariate") return DetectorKind::kUnivariate;
  return absl::InvalidArgumentError(absl::StrCat("unknown detector kind '", name,
                                                 "'"));
}

absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& text) {
  try {
    return ParseJson(json::parse(text));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string SerializeConfig(const ExperimentConfig& c) {
  const ScenarioConfig& s = c.scenario;
  json root;
  root["scenario"] = {{"kind", s.kind},
                      {"domain_lower", s.domain_lower},
                      {"domain_upper", s.domain_upper},
                      {"x_law", s.x_law},
                      {"ball_radius", s.ball_radius},
                      {"weight_bin_width", s.weight_bin_width},
                      {"bin_weights", s.bin_weights},
                      {"pre_function", FunctionJson(s.pre_function)},
                      {"post_function", FunctionJson(s.post_function)},
                      {"pre_mean", s.pre_mean},
                      {"post_mean", s.post_mean},
                      {"change_time_steps", OptionalJson(s.change_time_steps)},
                      {"noise", s.noise},
                      {"sigma_response_units", s.sigma_response_units},
                      {"horizon_steps", s.horizon_steps}};
  root["detector"] = {{"kind", c.detector.kind},
                      {"scan", c.detector.scan},
                      {"restart", c.detector.restart},
                      {"zero_noise", c.detector.zero_noise}};
  root["privacy"] = {
      {"alpha", c.privacy.alpha},
      {"truncation_m_response_units", c.privacy.truncation_m_response_units},
      {"interval_length_response_units",
       c.privacy.interval_length_response_units}};
  const ThresholdSection& t = c.thresholds;
  root["thresholds"] = {
      {"gamma", t.gamma},
      {"bin_width_x_units", t.bin_width_x_units},
      {"m0_bound_response_units", OptionalJson(t.m0_bound_response_units)},
      {"sigma_response_units", OptionalJson(t.sigma_response_units)},
      {"c_lip_response_per_x_unit", OptionalJson(t.c_lip_response_per_x_unit)},
      {"c_min", OptionalJson(t.c_min)},
      {"c_snr", t.c_snr},
      {"c_eps", t.c_eps},
      {"c_d", t.c_d}};
  root["n_reps"] = c.n_reps;
  root["master_seed"] = c.master_seed;
  root["parallelism"] = c.parallelism;
  root["sweep"] = c.sweep.has_value()
                      ? json{{"parameter", c.sweep->parameter},
                             {"values", c.sweep->values}}
                      : json(nullptr);
  root["output"] = {{"summary_csv", c.output.summary_csv},
                    {"plot_data_prefix", c.output.plot_data_prefix}};
  return root.dump(2) + "\n";
}

absl::StatusOr<ExperimentConfig> ApplySweepValue(const ExperimentConfig& config,
                                                 const std::string& parameter,
                                                 double value) {
  ExperimentConfig c = config;
  if (parameter == "alpha") {
    c.privacy.alpha = value;
  } else if (parameter == "bin_width") {
    c.thresholds.bin_width_x_units = value;
  } else if (parameter == "change_time") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      return absl::InvalidArgumentError("change_time sweep values must be integers >= 1");
    }
    c.scenario.change_time_steps = static_cast<int64_t>(value);
  } else if (parameter == "kappa") {
    if (c.scenario.kind == "univariate") {
      c.scenario.post_mean = c.scenario.pre_mean + value;
    } else {
      absl::StatusOr<ScenarioSpec> spec = BuildScenario(config);
      if (!spec.ok()) return spec.status();
      if (!(spec->kappa > 0.0)) {
        return absl::InvalidArgumentError("kappa sweep needs a nonzero base change");
      }
      absl::StatusOr<FunctionConfig> post =
          ScaledPostFunction(c.scenario, value / spec->kappa);
      if (!post.ok()) return post.status();
      c.scenario.post_function = *post;
    }
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown sweep parameter '", parameter, "'"));
  }
  return c;
}

absl::StatusOr<ScenarioSpec> BuildScenario(const ExperimentConfig& config) {
  const ScenarioConfig& s = config.scenario;
  const int64_t change = s.change_time_steps.value_or(kNoChange);
  NoiseLaw noise;
  if (s.noise == "gaussian") {
    noise = NoiseLaw::kGaussian;
  } else if (s.noise == "uniform") {
    noise = NoiseLaw::kUniform;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown noise law '", s.noise, "'"));
  }
  ScenarioSpec spec;
  if (s.kind == "univariate") {
    spec = UnivariateScenario(s.pre_mean, s.post_mean, change,
                              s.sigma_response_units, s.horizon_steps, noise);
  } else if (s.kind == "regression") {
    if (s.domain_lower.size() != s.domain_upper.size() || s.domain_lower.empty()) {
      return absl::InvalidArgumentError("domain bounds must have equal, nonzero length");
    }
    const Eigen::VectorXd lower = Eigen::Map<const Eigen::VectorXd>(
        s.domain_lower.data(), s.domain_lower.size());
    const Eigen::VectorXd upper = Eigen::Map<const Eigen::VectorXd>(
        s.domain_upper.data(), s.domain_upper.size());
    spec = RegressionScenario(lower, upper, ToFunction(s.pre_function),
                              ToFunction(s.post_function), change,
                              s.sigma_response_units, s.horizon_steps);
    spec.noise = noise;
    if (s.x_law == "uniform_box") {
      spec.x_law = CovariateLaw::kUniformBox;
    } else if (s.x_law == "uniform_ball") {
      spec.x_law = CovariateLaw::kUniformBall;
      spec.ball_radius = s.ball_radius;
    } else if (s.x_law == "bin_weighted") {
      spec.x_law = CovariateLaw::kBinWeighted;
      spec.weight_bin_width = s.weight_bin_width;
      spec.bin_weights = s.bin_weights;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown covariate law '", s.x_law, "'"));
    }
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown scenario kind '", s.kind, "'"));
  }
  if (absl::Status st = spec.Validate(); !st.ok()) return st;
  return spec;
}

absl::StatusOr<ResolvedDetector> ResolveDetector(const ExperimentConfig& config,
                                                 const ScenarioSpec& spec) {
  ResolvedDetector out;
  absl::StatusOr<DetectorKind> kind = ParseDetectorKind(config.detector.kind);
  if (!kind.ok()) return kind.status();
  DetectorConfig& d = out.detector;
  d.kind = *kind;
  if (config.detector.scan == "full") {
    d.scan = ScanPolicy::kFull;
  } else if (config.detector.scan == "dyadic") {
    d.scan = ScanPolicy::kDyadic;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown scan policy '", config.detector.scan, "'"));
  }
  d.zero_noise = config.detector.zero_noise;
  d.interval_length = config.privacy.interval_length_response_units;
  const ThresholdSection& t = config.thresholds;
  ThresholdParams& p = d.thresholds;
  p.gamma = t.gamma;
  p.alpha = config.privacy.alpha;
  p.truncation_m = config.privacy.truncation_m_response_units;
  p.bin_width = t.bin_width_x_units;
  p.dim = std::max(1, spec.dim());
  p.m0_bound = t.m0_bound_response_units.value_or(spec.M0());
  p.sigma = t.sigma_response_units.value_or(spec.sigma);
  p.c_lip = t.c_lip_response_per_x_unit.value_or(spec.CLip());
  if (t.c_min.has_value()) {
    p.c_min = *t.c_min;
  } else if (d.kind != DetectorKind::kUnivariate) {
    absl::StatusOr<BinPartition> partition =
        BinPartition::Create(spec.lower, spec.upper, p.bin_width);
    if (!partition.ok()) return partition.status();
    if (spec.x_law == CovariateLaw::kUniformBox) {
      p.c_min = UniformDensityFloor(*partition).value;
    } else {
      StreamGenerator calibration(spec, config.master_seed ^ 0xca11b7a7e);
      std::vector<Eigen::VectorXd> points;
      points.reserve(kCalibrationPoints);
      for (int64_t i = 0; i < kCalibrationPoints; ++i) {
        points.push_back(calibration.Next().x);
      }
      absl::StatusOr<DensityFloor> floor = EstimateDensityFloor(*partition, points);
      if (!floor.ok()) return floor.status();
      if (!(floor->value > 0.0)) {
        return absl::InvalidArgumentError(
            "estimated c_min is zero: some bin receives no covariate mass; "
            "supply thresholds.c_min or a coarser bin width");
      }
      p.c_min = floor->value;
      out.c_min_estimated = true;
      out.warnings.push_back(absl::StrCat("c_min estimated from ", kCalibrationPoints,
                                          " calibration points: ", p.c_min));
    }
  }
  if (absl::Status st = p.Validate(); !st.ok()) return st;
  if (d.kind == DetectorKind::kPrivate) {
    if (!(p.alpha <= 1.0)) {
      return absl::InvalidArgumentError("private detector needs alpha <= 1");
    }
    const double floor = M1TruncationFloor(p.m0_bound, p.sigma, p.bin_width);
    if (p.truncation_m < floor) {
      return absl::InvalidArgumentError(absl::StrCat(
          "truncation level M=", p.truncation_m, " is below M1=", floor,
          " for M0=", p.m0_bound, ", sigma=", p.sigma, ", h=", p.bin_width));
    }
  }
  if (spec.change_time != kNoChange && spec.kappa > 0.0) {
    absl::StatusOr<SnrResult> snr =
        SnrCheck(d.kind, spec.kappa, static_cast<double>(spec.change_time), p,
                 t.c_snr);
    if (snr.ok()) {
      out.snr_ratio = snr->ratio;
      if (!snr->pass) {
        out.warnings.push_back(absl::StrCat(
            "signal-to-noise condition unmet: ratio ", snr->ratio, " < 1"));
      }
    }
  }
  return out;
}

}  // namespace privcusum::cli
