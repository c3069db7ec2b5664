// Copyright 2026 The mstraj Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mstraj/metrics.hpp"
#include "mstraj/scenario.hpp"
#include "mstraj/tracker.hpp"

namespace mstraj {

enum class ScenarioKind { kS1, kS2 };

/// Scenario 1 keeps one truth realization for every run; Scenario 2 draws
/// new midpoints per run. Measurement noise always differs per run.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::kS1;
  int steps = 81;
  FilterKind filter = FilterKind::kPmbm;
  Variant variant = Variant::kAll;
  int n_scan = 3;
  int l_scan = 4;
  bool smoothing = true;            // joint window N + L when on, 1 when off
  std::uint64_t seed = 1;
  int runs = 100;
  int threads = 0;                  // 0: hardware concurrency
  bool trajectory_metric = true;    // LP metric at every scan
  std::optional<double> ps;
  std::optional<double> pd;
  std::optional<double> clutter_rate;

  void validate() const;
};

/// Tracker configuration for a scenario (models, births, window, N).
TrackerConfig make_tracker_config(const ScenarioConfig& cfg);
ScenarioModels scenario_models(const ScenarioConfig& cfg);
GroundTruth scenario_truth(const ScenarioConfig& cfg, int run);

struct ScanMetrics {
  int scan = 0;
  GospaResult gospa;
  TrajMetricResult lp;
  int cardinality = 0;
  int truth_count = 0;
};

struct RunResult {
  int run = 0;
  bool diverged = false;
  std::string error;
  double seconds = 0.0;  // filter time only
  std::vector<ScanMetrics> scans;
  std::vector<TrajectoryEstimate> final_estimates;
  GroundTruth truth;
};

/// One Monte Carlo run (deterministic in seed and run index).
RunResult run_single(const ScenarioConfig& cfg, int run);

struct AggregateRow {
  std::string metric;     // gospa, lp, time
  std::string component;  // total, localization, missed, false, switch
  double sum_rms = 0.0;   // sum over scans of the RMS over runs
  double rms_sum = 0.0;   // RMS over runs of the per-run sum over scans
};

struct MonteCarloResult {
  ScenarioConfig config;
  std::vector<RunResult> runs;
  std::vector<AggregateRow> summary;
  int diverged = 0;

  [[nodiscard]] const AggregateRow& row(const std::string& metric,
                                        const std::string& component) const;
};

MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg);

/// summary.csv, per_scan.csv, estimates.jsonl and truth.jsonl under `dir`.
void write_outputs(const MonteCarloResult& result, const std::string& dir);

/// Applies the keys present in a JSON document to `base`.
ScenarioConfig apply_config_json(const std::string& text, ScenarioConfig base);

}  // namespace mstraj
