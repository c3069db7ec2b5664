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

#include "mstraj/trajectory.hpp"

namespace mstraj {

/// Set of current trajectories or set of all trajectories.
enum class Variant { kCurrent, kAll };

struct FilterSettings {
  Variant variant = Variant::kCurrent;
  int n_scan = 3;                  // N-scan pruning depth
  TrajectorySettings traj;         // joint window and mixture pruning
  double gate_prob = 0.999;
  double r_update_min = 1e-3;      // below this a Bernoulli only gets a misdetection child
  double poisson_prune = 1e-3;
  double r_delete = 1e-4;          // resolved single-leaf tracks below this are removed
};

}  // namespace mstraj
