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

#include <cstddef>
#include <vector>

#include "mstraj/models.hpp"
#include "mstraj/smoothing.hpp"

namespace mstraj {

/// Position part (x, y) of a state [px, vx, py, vy].
[[nodiscard]] inline Vec2 position(const Vec4& x) { return {x[0], x[2]}; }

struct GospaParams {
  double p = 2.0;
  double c = 10.0;
  double alpha = 2.0;
};

/// Components are reported already rooted: localization = (sum d^p)^(1/p),
/// missed = (n_missed c^p / 2)^(1/p), false_ likewise, so that
/// total^p = localization^p + missed^p + false_^p.
struct GospaResult {
  double total = 0.0;
  double localization = 0.0;
  double missed = 0.0;
  double false_ = 0.0;
  int n_missed = 0;
  int n_false = 0;
};

/// GOSPA between point sets (positions). Only alpha = 2 is supported.
GospaResult gospa(const std::vector<Vec2>& estimates, const std::vector<Vec2>& truth,
                  const GospaParams& params = {});

struct TrajMetricParams {
  double p = 2.0;
  double c = 10.0;
  double gamma = 2.0;
  std::size_t max_states = 200000;  // per interacting group of trajectories
};

/// Same rooting convention as GospaResult, plus the switch term; every
/// component is divided by sqrt(k).
struct TrajMetricResult {
  double total = 0.0;
  double localization = 0.0;
  double missed = 0.0;
  double false_ = 0.0;
  double switch_ = 0.0;
};

/// Multi-scan trajectory metric over times 1..k with time-varying
/// assignments and a switch cost of gamma^p / 2 per changed assignment
/// entry. Solved exactly per group of trajectories that come within c of
/// each other. Throws CapabilityError if a group has too many joint
/// assignments.
TrajMetricResult lp_trajectory_metric(const std::vector<TrajectoryEstimate>& estimates,
                                      const std::vector<TrajectoryEstimate>& truth, int k,
                                      const TrajMetricParams& params = {});

}  // namespace mstraj
