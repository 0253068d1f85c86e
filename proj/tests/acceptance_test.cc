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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "privcusum/cusum.h"
#include "privcusum/detector.h"
#include "privcusum/metrics.h"
#include "privcusum/partition.h"
#include "privcusum/pipeline.h"
#include "privcusum/privacy.h"
#include "privcusum/random.h"
#include "privcusum/scenario.h"
#include "privcusum/thresholds.h"

namespace privcusum {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass = false;
  std::string detail;
};

int Workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

template <typename T>
T OrDie(absl::StatusOr<T> v) {
  if (!v.ok()) {
    std::fprintf(stderr, "setup failed: %s\n", std::string(v.status().message()).c_str());
    std::abort();
  }
  return *std::move(v);
}

// ---------------------------------------------------------------------------
// 1. Privacy audit.

Verdict PrivacyBound() {
  bool pass = true;
  std::string detail;
  for (double alpha : {0.25, 1.0}) {
    const RegressionChannel reg{OrDie(BinPartition::UnitCube(1, 0.25)),
                                OrDie(PrivacyParams::Create(alpha, 1.0))};
    const UnivariateChannel uni = OrDie(UnivariateChannel::Create(alpha, 1.0));
    for (const AuditReport& r : {RandomizedAudit(reg, 10000, 11, 1e-12),
                                 RandomizedAudit(uni, 10000, 12, 1e-12)}) {
      pass &= r.violations == 0 && r.max_loss <= alpha + 1e-12;
      absl::StrAppendFormat(&detail, " a=%g:max=%.6g/viol=%d", alpha, r.max_loss,
                            r.violations);
    }
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 2. Streaming statistics and alarms against offline recomputation.

bool Close(double a, double b) {
  return std::abs(a - b) <= 1e-10 * std::max(std::abs(b), 1.0);
}

double BruteUnivariate(const std::vector<double>& z, int s, int t) {
  double a = 0.0;
  double b = 0.0;
  for (int i = 0; i < s; ++i) a += z[i];
  for (int i = s; i < t; ++i) b += z[i];
  return std::sqrt(static_cast<double>(s) * (t - s) / t) *
         std::abs(a / s - b / (t - s));
}

double BrutePrivate(const std::vector<PrivateObservation>& obs, int s, int t) {
  const Eigen::Index bins = obs.front().w.size();
  double best = 0.0;
  for (Eigen::Index j = 0; j < bins; ++j) {
    double w1 = 0, z1 = 0, w2 = 0, z2 = 0;
    for (int i = 0; i < s; ++i) {
      w1 += obs[i].w[j];
      z1 += obs[i].z[j];
    }
    for (int i = s; i < t; ++i) {
      w2 += obs[i].w[j];
      z2 += obs[i].z[j];
    }
    const int l1 = s;
    const int l2 = t - s;
    const double f1 = w1 / l1 >= std::log(l1 + 1.0) / l1 ? z1 / w1 : 0.0;
    const double f2 = w2 / l2 >= std::log(l2 + 1.0) / l2 ? z2 / w2 : 0.0;
    best = std::max(best, std::abs(f1 - f2));
  }
  return std::sqrt(static_cast<double>(s) * (t - s) / t) * best;
}

double BruteNonprivate(const std::vector<RawObservation>& obs,
                       const std::vector<int64_t>& bin, int64_t num_bins, int s,
                       int t) {
  double best = 0.0;
  for (int64_t j = 0; j < num_bins; ++j) {
    double n1 = 0, y1 = 0, n2 = 0, y2 = 0;
    for (int i = 0; i < t; ++i) {
      if (bin[i] != j) continue;
      (i < s ? n1 : n2) += 1;
      (i < s ? y1 : y2) += obs[i].y;
    }
    if (n1 == 0 || n2 == 0) continue;  // no two-sided comparison in bin j
    best = std::max(best, std::abs(y1 / n1 - y2 / n2));
  }
  return std::sqrt(static_cast<double>(s) * (t - s) / t) * best;
}

// Pushes the stream through the engine, compares every statistic, then runs
// the detector with threshold b and compares the alarm time.
template <typename Engine, typename Obs>
bool CheckStream(Engine engine, Engine fresh, const std::vector<Obs>& stream,
                 const std::function<double(int, int)>& brute, double b,
                 int64_t& compared, double& worst, int& alarms) {
  bool ok = true;
  std::optional<int64_t> oracle_alarm;
  for (int t = 1; t <= static_cast<int>(stream.size()); ++t) {
    if (!engine.Push(stream[t - 1]).ok()) return false;
    for (int s = 1; s < t; ++s) {
      const double got = engine.Statistic(s);
      const double want = brute(s, t);
      worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1.0));
      ok &= Close(got, want);
      ++compared;
      if (!oracle_alarm && want > b) oracle_alarm = t;
    }
  }
  auto source = [&, i = size_t{0}]() mutable -> absl::StatusOr<std::optional<Obs>> {
    if (i == stream.size()) return std::nullopt;
    return std::optional<Obs>(stream[i++]);
  };
  const absl::StatusOr<DetectionResult> result = RunDetector(
      source, std::move(fresh), [b](int64_t, int64_t) { return b; });
  alarms += oracle_alarm.has_value() ? 1 : 0;
  return ok && result.ok() && result->first_alarm() == oracle_alarm;
}

Verdict OracleEquivalence() {
  constexpr int kT = 200;
  bool pass = true;
  int64_t compared = 0;
  double worst = 0.0;
  int streams = 0;
  int alarms = 0;
  const BinPartition partition = OrDie(BinPartition::UnitCube(1, 0.25));
  const RegressionChannel channel{partition, OrDie(PrivacyParams::Create(1.0, 1.0))};
  for (uint64_t rep = 0; rep < 20; ++rep) {
    const uint64_t seed = ReplicationSeed(4242, static_cast<int64_t>(rep));
    const int64_t change = 60 + static_cast<int64_t>(rep) * 5;

    // Univariate.
    StreamGenerator uni(UnivariateScenario(0.0, 1.0, change, 1.0, kT), DataSeed(seed));
    std::vector<UnivariateObservation> zs;
    std::vector<double> z;
    const UnivariateChannel uch = OrDie(UnivariateChannel::Create(1.0, 1.0));
    for (int t = 1; t <= kT; ++t) {
      const RawObservation raw = uni.Next();
      z.push_back(PrivatizeUnivariate(raw.y, t, uch, PrivacyNoise(seed)));
      zs.push_back({t, z.back()});
    }
    pass &= CheckStream(UnivariateEngine(Retention::kAll),
                        UnivariateEngine(Retention::kAll), zs,
                        [&](int s, int t) { return BruteUnivariate(z, s, t); }, 6.0,
                        compared, worst, alarms);

    // Regression streams share the raw data.
    const ScenarioSpec reg_spec = RegressionScenario(
        Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
        RegressionFunction::Constant(-0.5), RegressionFunction::Constant(0.5), change,
        0.5, kT);
    StreamGenerator gen(reg_spec, DataSeed(seed));
    std::vector<RawObservation> raw;
    std::vector<int64_t> bins;
    std::vector<PrivateObservation> priv;
    for (int t = 1; t <= kT; ++t) {
      raw.push_back(gen.Next());
      bins.push_back(OrDie(partition.Locate(raw.back().x)));
      priv.push_back(OrDie(PrivatizeRegression(raw.back(), channel, PrivacyNoise(seed))));
    }
    pass &= CheckStream(PrivateRegressionEngine(4, Retention::kAll),
                        PrivateRegressionEngine(4, Retention::kAll), priv,
                        [&](int s, int t) { return BrutePrivate(priv, s, t); }, 12.0,
                        compared, worst, alarms);
    pass &= CheckStream(NonprivateRegressionEngine(partition, Retention::kAll),
                        NonprivateRegressionEngine(partition, Retention::kAll), raw,
                        [&](int s, int t) {
                          return BruteNonprivate(raw, bins, 4, s, t);
                        },
                        8.0, compared, worst, alarms);
    streams += 3;
  }
  return {pass, absl::StrFormat(" statistics=%d worst_rel_err=%.3g streams=%d with_alarm=%d",
                                compared, worst, streams, alarms)};
}

// ---------------------------------------------------------------------------
// 3-5. Univariate false alarms and delay scaling.

DetectorConfig UnivariateDetector(double alpha, double sigma, double gamma) {
  DetectorConfig config;
  config.kind = DetectorKind::kUnivariate;
  config.scan = ScanPolicy::kFull;
  config.thresholds.alpha = alpha;
  config.thresholds.sigma = sigma;
  config.thresholds.gamma = gamma;
  return config;
}

Verdict FalseAlarmControl() {
  constexpr double kGamma = 0.05;
  constexpr int kReps = 500;
  const ScenarioSpec spec = UnivariateScenario(0.0, 0.0, kNoChange, 0.5, 500);
  const std::vector<RunOutcome> outs = RunReplications(
      spec, UnivariateDetector(1.0, 0.5, kGamma), kReps, 303, Workers());
  const Summary s = Summarize(outs, kGamma);
  const double limit = kGamma + 3.0 * std::sqrt(kGamma * (1 - kGamma) / kReps);
  return {s.errors == 0 && s.false_alarm_rate <= limit,
          absl::StrFormat(" rate=%.4f limit=%.4f runs=%d", s.false_alarm_rate, limit,
                          s.runs)};
}

struct SweepPoint {
  double x;
  Summary summary;
};

// Median delays over a sweep, with the log-log slope when every median is
// finite.
Verdict DelaySlope(const std::vector<SweepPoint>& points, bool require_detection) {
  std::vector<double> x;
  std::vector<double> y;
  bool detection_ok = true;
  std::string detail;
  for (const SweepPoint& p : points) {
    absl::StrAppendFormat(&detail, " x=%g:median=%g/det=%.3f/fa=%.3f", p.x,
                          p.summary.delay_median, p.summary.detection_rate,
                          p.summary.false_alarm_rate);
    detection_ok &= p.summary.detection_rate >= 0.95;
    x.push_back(p.x);
    y.push_back(p.summary.delay_median);
  }
  const absl::StatusOr<ScalingFit> fit = FitScaling(x, y);
  if (!fit.ok()) {
    absl::StrAppend(&detail, " slope=undefined (", fit.status().message(), ")");
    return {false, detail};
  }
  absl::StrAppendFormat(&detail, " slope=%.3f", fit->slope);
  const bool slope_ok = fit->slope >= -2.5 && fit->slope <= -1.5;
  return {slope_ok && (!require_detection || detection_ok), detail};
}

constexpr int64_t kScalingChange = 200;
constexpr int64_t kScalingHorizon = 2000;
constexpr int kScalingReps = 300;

Verdict DelayScalingAlpha() {
  std::vector<SweepPoint> points;
  for (double alpha : {0.25, 0.5, 1.0}) {
    const ScenarioSpec spec =
        UnivariateScenario(0.0, 1.0, kScalingChange, 0.05, kScalingHorizon);
    const std::vector<RunOutcome> outs = RunReplications(
        spec, UnivariateDetector(alpha, 0.05, 0.05), kScalingReps, 404, Workers());
    points.push_back({alpha, Summarize(outs, 0.05)});
  }
  return DelaySlope(points, /*require_detection=*/true);
}

Verdict DelayScalingKappa() {
  std::vector<SweepPoint> points;
  for (double kappa : {0.5, 1.0, 2.0}) {
    const ScenarioSpec spec =
        UnivariateScenario(0.0, kappa, kScalingChange, 0.05, kScalingHorizon);
    const std::vector<RunOutcome> outs = RunReplications(
        spec, UnivariateDetector(1.0, 0.05, 0.05), kScalingReps, 505, Workers());
    points.push_back({kappa, Summarize(outs, 0.05)});
  }
  return DelaySlope(points, /*require_detection=*/false);
}

// ---------------------------------------------------------------------------
// 6. Cost of privacy.

Verdict CostOfPrivacy() {
  constexpr int64_t kChange = 400000;
  constexpr int64_t kHorizon = 1200000;
  constexpr int kReps = 20;
  const ScenarioSpec spec = RegressionScenario(
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
      RegressionFunction::Constant(-1.0), RegressionFunction::Constant(1.0), kChange,
      0.1, kHorizon);
  DetectorConfig config;
  config.scan = ScanPolicy::kDyadic;
  ThresholdParams& p = config.thresholds;
  p.gamma = 0.05;
  p.alpha = 0.5;
  p.truncation_m = 1.5;
  p.m0_bound = spec.M0();
  p.sigma = spec.sigma;
  p.c_lip = spec.CLip();
  p.bin_width = 0.25;
  p.dim = 1;
  p.c_min = UniformDensityFloor(OrDie(BinPartition::UnitCube(1, 0.25))).value;
  const SnrResult snr = OrDie(SnrCheck(DetectorKind::kPrivate, spec.kappa,
                                       static_cast<double>(kChange), p, 1.0));

  config.kind = DetectorKind::kPrivate;
  const Summary priv = Summarize(RunReplications(spec, config, kReps, 606, Workers()),
                                 p.gamma);
  config.kind = DetectorKind::kNonprivate;
  const Summary nonpriv =
      Summarize(RunReplications(spec, config, kReps, 606, Workers()), p.gamma);
  const bool pass = priv.errors == 0 && nonpriv.errors == 0 &&
                    priv.delay_median > nonpriv.delay_median &&
                    std::isfinite(priv.delay_median) && priv.detection_rate >= 0.9 &&
                    nonpriv.detection_rate >= 0.9 && snr.ratio >= 20.0 &&
                    priv.false_alarm_rate <= p.gamma &&
                    nonpriv.false_alarm_rate <= p.gamma;
  return {pass,
          absl::StrFormat(" private_median=%g nonprivate_median=%g det=%.2f/%.2f "
                          "fa=%.2f/%.2f snr_ratio=%.1f",
                          priv.delay_median, nonpriv.delay_median, priv.detection_rate,
                          nonpriv.detection_rate, priv.false_alarm_rate,
                          nonpriv.false_alarm_rate, snr.ratio)};
}

// ---------------------------------------------------------------------------
// 7. Population CUSUM on a noiseless dense design.

Verdict PopulationCusum() {
  constexpr int kChange = 64;
  constexpr int kT = 128;
  constexpr double kH = 1.0 / 32.0;
  const BinPartition partition = OrDie(BinPartition::UnitCube(1, kH));
  // Cone of height kappa = 1 and slope C_Lip = 1 peaking at a bin centre.
  const double peak = 16.5 * kH;
  const RegressionFunction pre = RegressionFunction::Constant(0.0);
  const RegressionFunction post =
      RegressionFunction::Bump(0.0, 1.0, Eigen::VectorXd::Constant(1, peak), 1.0);
  const double population = std::sqrt(kChange * (kT - kChange) / double{kT});
  const double tol = 2.0 * population * post.Lipschitz() * std::sqrt(1.0) * kH;

  // Stratified jittered design: step i visits bin (i mod bins).
  auto stream = [&](int bins_used, int first_bin) {
    std::vector<RawObservation> out;
    RandomStream jitter(77);
    for (int t = 1; t <= kT; ++t) {
      const int bin = first_bin + (t - 1) % bins_used;
      const double x = (bin + jitter.Uniform()) * kH;
      const Eigen::VectorXd xv = Eigen::VectorXd::Constant(1, x);
      out.push_back({t, xv, t <= kChange ? pre(xv) : post(xv)});
    }
    return out;
  };

  // (a) Non-private statistic over every bin.
  NonprivateRegressionEngine nonpriv(partition, Retention::kAll);
  for (const RawObservation& o : stream(32, 0)) {
    if (!nonpriv.Push(o).ok()) return {false, " push failed"};
  }
  const double d_nonpriv = OrDie(CusumNonprivate(nonpriv.state(), kChange, kT));

  // (b) Private statistic, zero noise. The indicator floor needs each bin to
  // hold a visible share of each segment, so covariates cycle over four bins
  // around the peak.
  const RegressionChannel channel{partition, OrDie(PrivacyParams::Create(1.0, 2.0))};
  PrivateRegressionEngine priv(partition.num_bins(), Retention::kAll);
  for (const RawObservation& o : stream(4, 15)) {
    if (!priv.Push(OrDie(PrivatizeRegression(o, channel, CounterRng::ZeroNoise())))
             .ok()) {
      return {false, " push failed"};
    }
  }
  const double d_priv = OrDie(CusumPrivate(priv.state(), kChange, kT));

  const bool pass = std::abs(d_nonpriv - population) <= tol &&
                    std::abs(d_priv - population) <= tol;
  return {pass, absl::StrFormat(" target=%.4f tol=%.4f nonprivate=%.4f private=%.4f",
                                population, tol, d_nonpriv, d_priv)};
}

// ---------------------------------------------------------------------------
// 8. Concentration lemmas.

// Exact Chernoff bound for the mean of n standard Laplace variables, printed
// next to the closed-form bound for diagnosis: exp(-n I(x)) with
// I(x) = x^2 / (1 + r) + log(2 / (1 + r)), r = sqrt(1 + x^2).
double LaplaceChernoff(int n, double x) {
  const double r = std::sqrt(1.0 + x * x);
  return std::exp(-n * (x * x / (1.0 + r) + std::log(2.0 / (1.0 + r))));
}

Verdict Concentration() {
  constexpr int kTrials = 1000000;
  bool pass = true;
  std::string detail;
  for (int n : {10, 50, 200}) {
    RandomStream rng(8000 + n);
    int64_t hits[3] = {0, 0, 0};
    const double xs[3] = {0.25, 0.5, 1.0};
    for (int trial = 0; trial < kTrials; ++trial) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += LaplaceQuantile(rng.Uniform(), 1.0);
      const double mean = sum / n;
      for (int k = 0; k < 3; ++k) hits[k] += mean >= xs[k];
    }
    for (int k = 0; k < 3; ++k) {
      const double empirical = static_cast<double>(hits[k]) / kTrials;
      const double bound = LaplaceMeanTailBound(n, xs[k]);
      pass &= empirical <= bound;
      absl::StrAppendFormat(&detail, " lap(n=%d,x=%g)=%.3g%s%.3g[chernoff=%.3g]", n,
                            xs[k], empirical, empirical <= bound ? "<=" : ">", bound,
                            LaplaceChernoff(n, xs[k]));
    }
  }
  struct BernoulliCase {
    int n;
    double p;
    double x;
  };
  for (const BernoulliCase& c : {BernoulliCase{50, 0.5, 0.5}, BernoulliCase{100, 0.5, 0.5},
                                 BernoulliCase{50, 0.2, 1.0}}) {
    RandomStream rng(9000 + c.n);
    std::normal_distribution<double> normal;
    int64_t hits = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
      double num = 0.0;
      int count = 0;
      for (int i = 0; i < c.n; ++i) {
        const double eps = normal(rng);
        if (rng.Uniform() < c.p) {
          num += eps;
          ++count;
        }
      }
      hits += std::abs(num) >= c.x * count;
    }
    const double empirical = static_cast<double>(hits) / kTrials;
    const double bound = OrDie(BernoulliSumTailBound(c.n, c.p, c.x));
    pass &= empirical <= bound;
    absl::StrAppendFormat(&detail, " ber(n=%d,p=%g,x=%g)=%.3g%s%.3g", c.n, c.p, c.x,
                          empirical, empirical <= bound ? "<=" : ">", bound);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Lower-bound instance: delay must exceed the minimax order over 10.

Verdict LowerBoundDelay() {
  constexpr double kSigma = 0.3;
  constexpr double kKappa = 0.35;
  constexpr double kAlpha = 1.0;
  constexpr double kGamma = 0.05;
  const ScenarioSpec spec = OrDie(LowerBoundUnivariate(kKappa, kSigma, 6000, 14000));
  DetectorConfig config = UnivariateDetector(kAlpha, kSigma, kGamma);
  config.scan = ScanPolicy::kDyadic;
  const Summary s = Summarize(RunReplications(spec, config, 20, 707, Workers()), kGamma);
  const double order =
      kSigma * kSigma * std::log(1.0 / kGamma) / (kAlpha * kAlpha * kKappa * kKappa);
  // Missed detections count as infinite delay, which exceeds any order.
  return {s.errors == 0 && s.delay_median > order / 10.0,
          absl::StrFormat(" median_delay=%g order/10=%.4g det=%.2f", s.delay_median,
                          order / 10.0, s.detection_rate)};
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*run)();
};

}  // namespace
}  // namespace privcusum

int main(int argc, char** argv) {
  using namespace privcusum;
  const Criterion criteria[] = {
      {1, "privacy_bound", PrivacyBound},
      {2, "oracle_equivalence", OracleEquivalence},
      {3, "false_alarm_control", FalseAlarmControl},
      {4, "delay_scaling_alpha", DelayScalingAlpha},
      {5, "delay_scaling_kappa", DelayScalingKappa},
      {6, "cost_of_privacy", CostOfPrivacy},
      {7, "population_cusum", PopulationCusum},
      {8, "concentration_lemmas", Concentration},
      {9, "lower_bound_instance_delay", LowerBoundDelay},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d %s (%.1fs):%s\n", v.pass ? "PASS" : "FAIL", c.id,
                c.name, secs, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
