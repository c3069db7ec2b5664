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
#include <optional>
#include <vector>

#include "mstraj/assignment.hpp"
#include "mstraj/filter.hpp"
#include "mstraj/mbm.hpp"
#include "mstraj/pmbm.hpp"
#include "mstraj/smoothing.hpp"

namespace mstraj {

enum class FilterKind { kPmbm, kMbm, kMbm01 };

struct TrackerConfig {
  FilterKind filter = FilterKind::kPmbm;
  FilterSettings settings;
  MotionModel motion;
  MeasurementModel meas;
  BirthModel birth;              // Poisson for PMBM, multi-Bernoulli otherwise
  SolverOptions solver;
  std::size_t global_cap = 100;  // globals kept after pruning
};

struct ScanOutput {
  int k = 0;
  std::vector<TrajectoryEstimate> estimates;  // all reported trajectories
  SolveReport solve;
};

/// One filter run: predict, gate and update, multi-frame assignment,
/// N-scan pruning, track removal, fixed-lag smoothing and estimation.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  ScanOutput step(const std::vector<Vec2>& scan);

  [[nodiscard]] const HypothesisForest& forest() const;
  [[nodiscard]] const PoissonIntensity* undetected() const;
  [[nodiscard]] bool equality_mode() const { return config_.filter == FilterKind::kPmbm; }
  [[nodiscard]] const TrackerConfig& config() const { return config_; }

 private:
  TrackerConfig config_;
  std::optional<PmbmPosterior> pmbm_;
  std::optional<MbmPosterior> mbm_;
};

}  // namespace mstraj
