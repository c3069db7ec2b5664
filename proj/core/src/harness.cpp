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

#include "mstraj/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "mstraj/io.hpp"

namespace mstraj {

void ScenarioConfig::validate() const {
  MSTRAJ_EXPECT(steps >= 1, "steps must be at least 1");
  MSTRAJ_EXPECT(runs >= 1, "runs must be at least 1");
  MSTRAJ_EXPECT(n_scan >= 0, "N must be non-negative");
  MSTRAJ_EXPECT(l_scan >= 1, "L must be at least 1");
  MSTRAJ_EXPECT(threads >= 0, "threads must be non-negative");
  MSTRAJ_EXPECT(!ps || (*ps >= 0.0 && *ps <= 1.0), "ps must lie in [0, 1]");
  MSTRAJ_EXPECT(!pd || (*pd >= 0.0 && *pd <= 1.0), "pd must lie in [0, 1]");
  MSTRAJ_EXPECT(!clutter_rate || *clutter_rate > 0.0, "clutter rate must be positive");
}

ScenarioModels scenario_models(const ScenarioConfig& cfg) {
  ScenarioModels m = cfg.scenario == ScenarioKind::kS1 ? scenario1_models() : scenario2_models();
  if (cfg.ps) m.motion.ps = *cfg.ps;
  if (cfg.pd) m.meas.pd = *cfg.pd;
  if (cfg.clutter_rate) m.meas.clutter_rate = *cfg.clutter_rate;
  m.steps = cfg.steps;
  return m;
}

TrackerConfig make_tracker_config(const ScenarioConfig& cfg) {
  const ScenarioModels m = scenario_models(cfg);
  TrackerConfig tc;
  tc.filter = cfg.filter;
  tc.settings.variant = cfg.variant;
  tc.settings.n_scan = cfg.n_scan;
  tc.settings.traj.l_cap = cfg.smoothing ? cfg.n_scan + cfg.l_scan : 1;
  tc.motion = m.motion;
  tc.meas = m.meas;
  tc.birth = cfg.filter == FilterKind::kPmbm ? m.poisson_birth : m.bernoulli_birth;
  return tc;
}

GroundTruth scenario_truth(const ScenarioConfig& cfg, int run) {
  const ScenarioModels m = scenario_models(cfg);
  if (cfg.scenario == ScenarioKind::kS1) return generate_scenario1(cfg.seed, m.motion);
  return generate_scenario2(cfg.seed, static_cast<std::uint64_t>(run), m.motion, cfg.steps);
}

RunResult run_single(const ScenarioConfig& cfg, int run) {
  cfg.validate();
  RunResult res;
  res.run = run;
  const ScenarioModels m = scenario_models(cfg);
  res.truth = scenario_truth(cfg, run);
  auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(run), kMeasurementStream);
  try {
    Tracker tracker(make_tracker_config(cfg));
    for (int k = 1; k <= cfg.steps; ++k) {
      const auto scan = generate_measurements(res.truth, m.meas, k, rng);
      const auto t0 = std::chrono::steady_clock::now();
      ScanOutput out = tracker.step(scan);
      res.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      ScanMetrics sm;
      sm.scan = k;
      std::vector<Vec2> current;
      for (const auto& e : out.estimates) {
        if (e.eps == k) current.push_back(position(e.means.back()));
      }
      const auto truth_now = res.truth.positions(k);
      sm.gospa = gospa(current, truth_now);
      sm.cardinality = static_cast<int>(current.size());
      sm.truth_count = static_cast<int>(truth_now.size());
      if (cfg.trajectory_metric) {
        sm.lp = lp_trajectory_metric(out.estimates, res.truth.as_trajectories(k, cfg.variant), k);
      }
      res.scans.push_back(sm);
      if (k == cfg.steps) res.final_estimates = std::move(out.estimates);
    }
  } catch (const std::exception& e) {
    res.diverged = true;
    res.error = "scan " + std::to_string(res.scans.size() + 1) + ": " + e.what();
  }
  return res;
}

namespace {

struct Series {
  const char* metric;
  const char* component;
  double (*get)(const ScanMetrics&);
};

const std::vector<Series>& series() {
  static const std::vector<Series> s = {
      {"gospa", "total", [](const ScanMetrics& m) { return m.gospa.total; }},
      {"gospa", "localization", [](const ScanMetrics& m) { return m.gospa.localization; }},
      {"gospa", "missed", [](const ScanMetrics& m) { return m.gospa.missed; }},
      {"gospa", "false", [](const ScanMetrics& m) { return m.gospa.false_; }},
      {"lp", "total", [](const ScanMetrics& m) { return m.lp.total; }},
      {"lp", "localization", [](const ScanMetrics& m) { return m.lp.localization; }},
      {"lp", "missed", [](const ScanMetrics& m) { return m.lp.missed; }},
      {"lp", "false", [](const ScanMetrics& m) { return m.lp.false_; }},
      {"lp", "switch", [](const ScanMetrics& m) { return m.lp.switch_; }},
      {"cardinality", "estimated", [](const ScanMetrics& m) { return double(m.cardinality); }},
      {"cardinality", "truth", [](const ScanMetrics& m) { return double(m.truth_count); }},
  };
  return s;
}

std::vector<AggregateRow> aggregate(const ScenarioConfig& cfg, const std::vector<RunResult>& runs) {
  std::vector<const RunResult*> ok;
  for (const auto& r : runs) {
    if (!r.diverged) ok.push_back(&r);
  }
  std::vector<AggregateRow> rows;
  const double n = static_cast<double>(ok.size());
  for (const auto& s : series()) {
    if (std::string(s.metric) == "lp" && !cfg.trajectory_metric) continue;
    AggregateRow row{s.metric, s.component, 0.0, 0.0};
    if (!ok.empty()) {
      for (int k = 0; k < cfg.steps; ++k) {
        double sq = 0.0;
        for (const auto* r : ok) sq += std::pow(s.get(r->scans[k]), 2);
        row.sum_rms += std::sqrt(sq / n);
      }
      double sq = 0.0;
      for (const auto* r : ok) {
        double sum = 0.0;
        for (const auto& sm : r->scans) sum += s.get(sm);
        sq += sum * sum;
      }
      row.rms_sum = std::sqrt(sq / n);
    }
    rows.push_back(row);
  }
  AggregateRow time{"time", "seconds", 0.0, 0.0};
  for (const auto* r : ok) time.sum_rms += r->seconds;
  if (!ok.empty()) time.sum_rms /= n;
  time.rms_sum = time.sum_rms;
  rows.push_back(time);
  return rows;
}

}  // namespace

const AggregateRow& MonteCarloResult::row(const std::string& metric,
                                          const std::string& component) const {
  for (const auto& r : summary) {
    if (r.metric == metric && r.component == component) return r;
  }
  throw ContractViolation("no summary row " + metric + "/" + component);
}

MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg) {
  cfg.validate();
  MonteCarloResult res;
  res.config = cfg;
  res.runs.resize(cfg.runs);
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.runs));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < cfg.runs; r = next++) res.runs[r] = run_single(cfg, r);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& r : res.runs) res.diverged += r.diverged ? 1 : 0;
  res.summary = aggregate(cfg, res.runs);
  return res;
}

void write_outputs(const MonteCarloResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error(std::string("cannot write ") + (fs::path(dir) / name).string());
    out.precision(10);
    return out;
  };
  {
    auto out = open("summary.csv");
    out << "metric,component,sum_rms,rms_sum\n";
    for (const auto& r : result.summary) {
      out << r.metric << ',' << r.component << ',' << r.sum_rms << ',' << r.rms_sum << '\n';
    }
    out << "runs,diverged," << result.diverged << ',' << result.diverged << '\n';
  }
  {
    auto out = open("per_scan.csv");
    out << "run,scan,metric,component,value\n";
    for (const auto& run : result.runs) {
      for (const auto& sm : run.scans) {
        for (const auto& s : series()) {
          if (std::string(s.metric) == "lp" && !result.config.trajectory_metric) continue;
          out << run.run << ',' << sm.scan << ',' << s.metric << ',' << s.component << ','
              << s.get(sm) << '\n';
        }
      }
    }
  }
  {
    auto out = open("estimates.jsonl");
    for (const auto& run : result.runs) {
      for (const auto& e : run.final_estimates) out << estimate_to_jsonl(run.run, e) << '\n';
    }
  }
  {
    auto out = open("truth.jsonl");
    for (const auto& run : result.runs) out << truth_to_jsonl(run.run, run.truth);
  }
}

ScenarioConfig apply_config_json(const std::string& text, ScenarioConfig base) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("config is not valid JSON: ") + e.what());
  }
  MSTRAJ_EXPECT(doc.is_object(), "config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "scenario") {
        const auto s = v.get<std::string>();
        MSTRAJ_EXPECT(s == "s1" || s == "s2", "scenario must be s1 or s2");
        base.scenario = s == "s1" ? ScenarioKind::kS1 : ScenarioKind::kS2;
      } else if (key == "filter") {
        const auto s = v.get<std::string>();
        if (s == "pmbm") {
          base.filter = FilterKind::kPmbm;
        } else if (s == "mbm") {
          base.filter = FilterKind::kMbm;
        } else if (s == "mbm01") {
          base.filter = FilterKind::kMbm01;
        } else {
          throw ContractViolation("filter must be pmbm, mbm or mbm01");
        }
      } else if (key == "variant") {
        const auto s = v.get<std::string>();
        MSTRAJ_EXPECT(s == "current" || s == "all", "variant must be current or all");
        base.variant = s == "current" ? Variant::kCurrent : Variant::kAll;
      } else if (key == "steps") {
        base.steps = v.get<int>();
      } else if (key == "n_scan") {
        base.n_scan = v.get<int>();
      } else if (key == "l_scan") {
        base.l_scan = v.get<int>();
      } else if (key == "smoothing") {
        base.smoothing = v.get<bool>();
      } else if (key == "seed") {
        base.seed = v.get<std::uint64_t>();
      } else if (key == "runs") {
        base.runs = v.get<int>();
      } else if (key == "threads") {
        base.threads = v.get<int>();
      } else if (key == "trajectory_metric") {
        base.trajectory_metric = v.get<bool>();
      } else if (key == "ps") {
        base.ps = v.get<double>();
      } else if (key == "pd") {
        base.pd = v.get<double>();
      } else if (key == "clutter_rate") {
        base.clutter_rate = v.get<double>();
      } else {
        throw ContractViolation("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("bad config value: ") + e.what());
  }
  base.validate();
  return base;
}

}  // namespace mstraj
