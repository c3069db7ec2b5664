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

#include <random>

#include "mstraj/assignment.hpp"
#include "mstraj/harness.hpp"
#include "mstraj/hypothesis.hpp"
#include "mstraj/scenario.hpp"
#include "mstraj/tracker.hpp"

namespace {

using namespace mstraj;

// Square cost matrix with a share of forbidden pairs.
Eigen::MatrixXd random_costs(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::bernoulli_distribution forbid(0.2);
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = forbid(rng) ? kInf : u(rng);
  }
  return c;
}

void BM_Assignment2D(benchmark::State& state) {
  const Eigen::MatrixXd c = random_costs(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve_2d_assignment(c, true));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment2D)->RangeMultiplier(2)->Range(4, 128)->Complexity();

// Multi-frame problem taken from a Scenario 2 run at scan `k`.
MultiFrameProblem scenario_problem(FilterKind filter, int k) {
  ScenarioConfig cfg;
  cfg.scenario = ScenarioKind::kS2;
  cfg.steps = k;
  cfg.filter = filter;
  const ScenarioModels m = scenario_models(cfg);
  const GroundTruth truth = scenario_truth(cfg, 0);
  auto rng = make_rng(cfg.seed, 0, kMeasurementStream);
  Tracker tr(make_tracker_config(cfg));
  for (int t = 1; t <= k; ++t) tr.step(generate_measurements(truth, m.meas, t, rng));
  return build_multiframe_problem(tr.forest(), k, cfg.n_scan, tr.equality_mode());
}

void BM_DualDecomposition(benchmark::State& state) {
  const auto filter = static_cast<FilterKind>(state.range(0));
  const MultiFrameProblem p = scenario_problem(filter, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(dual_decomposition_solve(p));
}
BENCHMARK(BM_DualDecomposition)
    ->ArgsProduct({{0, 1, 2}, {20, 41}})
    ->ArgNames({"filter", "k"})
    ->Unit(benchmark::kMillisecond);

void BM_EnumerateBest(benchmark::State& state) {
  const MultiFrameProblem p = scenario_problem(FilterKind::kPmbm, 41);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_best_solutions(p, state.range(0), 400000));
  }
}
BENCHMARK(BM_EnumerateBest)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
