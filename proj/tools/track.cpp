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

// track: Monte Carlo runs, metric evaluation and solver replay.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mstraj/harness.hpp"
#include "mstraj/io.hpp"
#include "mstraj/metrics.hpp"

namespace {

using namespace mstraj;

int cmd_run(const ScenarioConfig& flags, const std::string& config_path, const std::string& out) {
  ScenarioConfig cfg = flags;
  if (!config_path.empty()) cfg = apply_config_json(read_file(config_path), cfg);
  cfg.validate();
  const MonteCarloResult res = run_monte_carlo(cfg);
  write_outputs(res, out);
  std::printf("%-12s %-13s %12s %12s\n", "metric", "component", "sum_rms", "rms_sum");
  for (const auto& r : res.summary) {
    std::printf("%-12s %-13s %12.4f %12.4f\n", r.metric.c_str(), r.component.c_str(), r.sum_rms,
                r.rms_sum);
  }
  for (const auto& r : res.runs) {
    if (r.diverged) std::fprintf(stderr, "run %d diverged: %s\n", r.run, r.error.c_str());
  }
  return res.diverged > 0 ? 2 : 0;
}

int cmd_metrics(const std::string& est_path, const std::string& truth_path, int k) {
  const auto est = trajectories_from_jsonl(read_file(est_path));
  const auto truth = trajectories_from_jsonl(read_file(truth_path));
  std::map<int, const RunTrajectories*> est_by_run;
  for (const auto& r : est) est_by_run[r.run] = &r;
  std::printf("run,metric,component,value\n");
  for (const auto& t : truth) {
    int horizon = k;
    if (horizon <= 0) {
      for (const auto& tr : t.trajectories) horizon = std::max(horizon, tr.eps);
    }
    static const std::vector<TrajectoryEstimate> none;
    const auto it = est_by_run.find(t.run);
    const auto& e = it == est_by_run.end() ? none : it->second->trajectories;

    std::vector<Vec2> xs, ys;
    for (const auto& tr : t.trajectories) {
      if (tr.beta <= horizon && tr.eps >= horizon) xs.push_back(position(tr.means[horizon - tr.beta]));
    }
    for (const auto& tr : e) {
      if (tr.beta <= horizon && tr.eps >= horizon) ys.push_back(position(tr.means[horizon - tr.beta]));
    }
    const GospaResult g = gospa(ys, xs);
    const TrajMetricResult lp = lp_trajectory_metric(e, t.trajectories, horizon);
    std::printf("%d,gospa,total,%.10g\n%d,gospa,localization,%.10g\n%d,gospa,missed,%.10g\n"
                "%d,gospa,false,%.10g\n",
                t.run, g.total, t.run, g.localization, t.run, g.missed, t.run, g.false_);
    std::printf("%d,lp,total,%.10g\n%d,lp,localization,%.10g\n%d,lp,missed,%.10g\n"
                "%d,lp,false,%.10g\n%d,lp,switch,%.10g\n",
                t.run, lp.total, t.run, lp.localization, t.run, lp.missed, t.run, lp.false_, t.run,
                lp.switch_);
  }
  return 0;
}

int cmd_assign(const std::string& path) {
  const MultiFrameProblem p = problem_from_json(read_file(path));
  const SolveReport r = dual_decomposition_solve(p);
  std::cout << report_to_json(r) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scan trajectory PMBM / MBM / MBM01 tracking"};
  app.require_subcommand(1);

  ScenarioConfig flags;
  std::string scenario = "s1", filter = "pmbm", variant = "all", smooth = "on";
  std::string out = "out", config_path;
  auto* run = app.add_subcommand("run", "Monte Carlo simulation of a scenario");
  run->add_option("--scenario", scenario, "s1 or s2")->check(CLI::IsMember({"s1", "s2"}));
  run->add_option("--filter", filter, "pmbm, mbm or mbm01")
      ->check(CLI::IsMember({"pmbm", "mbm", "mbm01"}));
  run->add_option("--variant", variant, "current or all")->check(CLI::IsMember({"current", "all"}));
  run->add_option("--runs", flags.runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
  run->add_option("--seed", flags.seed, "base seed");
  run->add_option("--smooth", smooth, "on or off")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--n-scan", flags.n_scan, "N-scan pruning depth")->check(CLI::NonNegativeNumber);
  run->add_option("--l-scan", flags.l_scan, "extra smoothing lag L")->check(CLI::PositiveNumber);
  run->add_option("--steps", flags.steps, "time steps")->check(CLI::PositiveNumber);
  run->add_option("--threads", flags.threads, "worker threads (0: all cores)");
  run->add_flag("!--no-lp", flags.trajectory_metric, "skip the trajectory metric");
  run->add_option("--out", out, "output directory");
  run->add_option("--config", config_path, "JSON file overriding the flags")->check(CLI::ExistingFile);

  std::string est_path, truth_path;
  int horizon = 0;
  auto* metrics = app.add_subcommand("metrics", "GOSPA and trajectory metric for JSONL files");
  metrics->add_option("--est", est_path, "estimates.jsonl")->required()->check(CLI::ExistingFile);
  metrics->add_option("--truth", truth_path, "truth.jsonl")->required()->check(CLI::ExistingFile);
  metrics->add_option("--k", horizon, "evaluation time (default: last truth time)");

  std::string problem_path;
  auto* assign = app.add_subcommand("assign", "Solve a multi-frame problem snapshot");
  assign->add_option("--problem", problem_path, "problem JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      flags.scenario = scenario == "s1" ? ScenarioKind::kS1 : ScenarioKind::kS2;
      flags.filter = filter == "pmbm" ? FilterKind::kPmbm
                     : filter == "mbm" ? FilterKind::kMbm
                                       : FilterKind::kMbm01;
      flags.variant = variant == "current" ? Variant::kCurrent : Variant::kAll;
      flags.smoothing = smooth == "on";
      return cmd_run(flags, config_path, out);
    }
    if (*metrics) return cmd_metrics(est_path, truth_path, horizon);
    if (*assign) return cmd_assign(problem_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
