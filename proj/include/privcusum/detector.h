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

#ifndef PRIVCUSUM_DETECTOR_H_
#define PRIVCUSUM_DETECTOR_H_

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "privcusum/cusum.h"
#include "privcusum/prefix_state.h"
#include "privcusum/thresholds.h"

namespace privcusum {

enum class ScanPolicy { kFull, kDyadic };

inline Retention RetentionFor(ScanPolicy scan) {
  return scan == ScanPolicy::kFull ? Retention::kAll : Retention::kDyadic;
}

template <typename E>
concept CusumEngine = requires(E engine, const E& cengine,
                               const typename E::Observation& obs,
                               std::vector<int64_t>& out, int64_t s) {
  { engine.Push(obs) } -> std::same_as<absl::Status>;
  { engine.Reset(s) };
  { cengine.time() } -> std::convertible_to<int64_t>;
  { cengine.origin() } -> std::convertible_to<int64_t>;
  { cengine.Candidates(out) };
  { cengine.Statistic(s) } -> std::convertible_to<double>;
};

// b_{s,t} in local (post-restart) time. May return +infinity.
using ThresholdFn = std::function<double(int64_t s, int64_t t)>;

// One scanned (s, t) pair. `s` and `t` are local times.
struct CusumReport {
  int64_t s = 0;
  int64_t t = 0;
  double statistic = 0.0;
  double threshold = kInfinity;
  bool exceeded = false;
};

struct StepSummary {
  int64_t time_index = 0;  // global stamp of the observation just consumed
  int64_t t = 0;           // local time
  // Max over scanned splits. When inactive pairs are skipped this covers only
  // pairs with a finite threshold; NaN when nothing was evaluated.
  double max_statistic = std::nan("");
  double min_active_threshold = kInfinity;
  // The exceeding pair with the largest statistic - threshold margin.
  std::optional<CusumReport> trigger;
};

struct Alarm {
  int64_t time_index = 0;  // global stamp at which the alarm fired
  int64_t origin = 0;      // global stamp preceding the segment's first point
  CusumReport report;      // local-time report
};

// Sequential detector: after each new observation at local time t >= 2, flag
// when some scanned split has statistic strictly above its threshold.
template <CusumEngine Engine>
class OnlineDetector {
 public:
  OnlineDetector(Engine engine, ThresholdFn threshold,
                 bool evaluate_inactive = false)
      : engine_(std::move(engine)),
        threshold_(std::move(threshold)),
        evaluate_inactive_(evaluate_inactive) {}

  absl::StatusOr<StepSummary> Step(const typename Engine::Observation& obs) {
    if (absl::Status st = engine_.Push(obs); !st.ok()) return st;
    StepSummary step;
    step.t = engine_.time();
    step.time_index = engine_.origin() + step.t;
    if (step.t < 2) return step;
    candidates_.clear();
    engine_.Candidates(candidates_);
    double best_margin = -kInfinity;
    for (int64_t s : candidates_) {
      const double b = threshold_(s, step.t);
      const bool active = std::isfinite(b);
      if (!active && !evaluate_inactive_) continue;
      const double d = engine_.Statistic(s);
      if (!(step.max_statistic >= d)) step.max_statistic = d;
      if (!active) continue;
      if (b < step.min_active_threshold) step.min_active_threshold = b;
      if (d > b && d - b > best_margin) {
        best_margin = d - b;
        step.trigger = CusumReport{s, step.t, d, b, true};
      }
    }
    return step;
  }

  void Reset(int64_t origin) { engine_.Reset(origin); }

  const Engine& engine() const { return engine_; }

 private:
  Engine engine_;
  ThresholdFn threshold_;
  bool evaluate_inactive_;
  std::vector<int64_t> candidates_;
};

struct RunOptions {
  // Stop after this many observations; <= 0 means run until the source ends.
  int64_t horizon = 0;
  // Keep going after an alarm, restarting all state at the alarm time.
  bool restart = false;
  // Evaluate statistics for pairs whose threshold is infinite (for traces).
  bool evaluate_inactive = false;
  // Called after every step when set.
  std::function<void(const StepSummary&)> on_step;
};

struct DetectionResult {
  std::vector<Alarm> alarms;
  int64_t observations = 0;

  std::optional<int64_t> first_alarm() const {
    if (alarms.empty()) return std::nullopt;
    return alarms.front().time_index;
  }
};

// Drives a detector from `next`, a callable returning
// absl::StatusOr<std::optional<Observation>> (nullopt ends the stream).
template <CusumEngine Engine, typename Source>
absl::StatusOr<DetectionResult> RunDetector(Source&& next, Engine engine,
                                            ThresholdFn threshold,
                                            const RunOptions& options = {}) {
  if (options.horizon == 1) {
    return absl::InvalidArgumentError("horizon must exceed 1");
  }
  OnlineDetector<Engine> detector(std::move(engine), std::move(threshold),
                                  options.evaluate_inactive);
  DetectionResult result;
  while (options.horizon <= 0 || result.observations < options.horizon) {
    absl::StatusOr<std::optional<typename Engine::Observation>> obs = next();
    if (!obs.ok()) return obs.status();
    if (!obs->has_value()) break;
    absl::StatusOr<StepSummary> step = detector.Step(**obs);
    if (!step.ok()) return step.status();
    ++result.observations;
    if (options.on_step) options.on_step(*step);
    if (!step->trigger.has_value()) continue;
    result.alarms.push_back(Alarm{step->time_index,
                                  step->time_index - step->t, *step->trigger});
    if (!options.restart) break;
    detector.Reset(step->time_index);
  }
  return result;
}

}  // namespace privcusum

#endif  // PRIVCUSUM_DETECTOR_H_
