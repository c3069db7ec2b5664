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

#include <string>
#include <vector>

#include "mstraj/assignment.hpp"
#include "mstraj/scenario.hpp"
#include "mstraj/smoothing.hpp"

namespace mstraj {

/// Multi-frame problem snapshot as JSON, for replaying the solver.
std::string problem_to_json(const MultiFrameProblem& p);
MultiFrameProblem problem_from_json(const std::string& text);

/// Solve report as JSON (solution, costs, gap, iterations).
std::string report_to_json(const SolveReport& r);

/// One JSON object per line: run, track, beta, eps, means.
std::string estimate_to_jsonl(int run, const TrajectoryEstimate& e);

struct RunTrajectories {
  int run = 0;
  std::vector<TrajectoryEstimate> trajectories;
};

/// Groups JSON lines by run (runs in first-seen order).
std::vector<RunTrajectories> trajectories_from_jsonl(const std::string& text);

/// Truth trajectories in the same line format.
std::string truth_to_jsonl(int run, const GroundTruth& gt);

std::string read_file(const std::string& path);

}  // namespace mstraj
