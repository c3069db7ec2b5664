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


#include <benchmark/benchmark.h>

#include <vector>

#include "mstraj/harness.hpp"
#include "mstraj/scenario.hpp"
#include "mstraj/tracker.hpp"

namespace {

using namespace mstraj;

// Whole Scenario 2 run; measurements are drawn outside the timed region.
void BM_ScenarioRun(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.scenario = ScenarioKind::kS2;
  cfg.steps = 50;
  cfg.filter = static_cast<FilterKind>(state.range(0));
  cfg.smoothing = state.range(1) != 0;
  const ScenarioModels m = scenario_models(cfg);
  const GroundTruth truth = scenario_truth(cfg, 0);
  auto rng = make_rng(cfg.seed, 0, kMeasurementStream);
  std::vector<std::vector<Vec2>> scans;
  for (int k = 1; k <= cfg.steps; ++k) scans.push_back(generate_measurements(truth, m.meas, k, rng));
  for (auto _ : state) {
    Tracker tr(make_tracker_config(cfg));
    for (const auto& z : scans) benchmark::DoNotOptimize(tr.step(z));
  }
}
BENCHMARK(BM_ScenarioRun)
    ->ArgsProduct({{0, 1, 2}, {0, 1}})
    ->ArgNames({"filter", "smooth"})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

// Single step of a Scenario 1 PMBM tracker at full load (all births in).
void BM_TrackerStep(benchmark::State& state) {
  ScenarioConfig cfg;
  const ScenarioModels m = scenario_models(cfg);
  const GroundTruth truth = scenario_truth(cfg, 0);
  auto rng = make_rng(cfg.seed, 0, kMeasurementStream);
  const int warm = 40;
  std::vector<std::vector<Vec2>> scans;
  for (int k = 1; k <= warm + 1; ++k) scans.push_back(generate_measurements(truth, m.meas, k, rng));
  Tracker base(make_tracker_config(cfg));
  for (int k = 0; k < warm; ++k) base.step(scans[k]);
  for (auto _ : state) {
    state.PauseTiming();
    Tracker tr = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(tr.step(scans[warm]));
  }
}
BENCHMARK(BM_TrackerStep)->Unit(benchmark::kMillisecond);

}  // namespace
