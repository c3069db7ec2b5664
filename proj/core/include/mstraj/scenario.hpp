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
#include <random>
#include <vector>

#include "mstraj/filter.hpp"
#include "mstraj/models.hpp"
#include "mstraj/smoothing.hpp"

namespace mstraj {

struct TruthTrajectory {
  int birth = 1;
  int death = 1;             // last time step at which the target exists
  std::vector<Vec4> states;  // birth..death

  [[nodiscard]] bool alive(int t) const { return t >= birth && t <= death; }
  [[nodiscard]] const Vec4& at(int t) const { return states.at(t - birth); }
};

struct GroundTruth {
  std::vector<TruthTrajectory> trajectories;

  /// Positions of the targets alive at t.
  [[nodiscard]] std::vector<Vec2> positions(int t) const;
  /// Trajectories cut to [birth, min(death, k)]; the current variant keeps
  /// only targets alive at k.
  [[nodiscard]] std::vector<TrajectoryEstimate> as_trajectories(int k, Variant variant) const;
};

/// Models shared by the two simulated scenarios.
struct ScenarioModels {
  MotionModel motion;
  MeasurementModel meas;
  BirthModel poisson_birth;
  BirthModel bernoulli_birth;
  int steps = 81;
};

ScenarioModels scenario1_models();
ScenarioModels scenario2_models();

/// Independent generator for (seed, run, stream); streams separate truth
/// and measurement noise so they can be varied independently.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t run, std::uint64_t stream);

inline constexpr std::uint64_t kTruthStream = 1;
inline constexpr std::uint64_t kMeasurementStream = 2;

/// Twelve well-separated targets born at (+-50, +-50), three per birth time
/// {1, 11, 21, 31}, each living 50 steps.
GroundTruth generate_scenario1(std::uint64_t seed, const MotionModel& motion);

/// Four targets whose states at the middle time step are drawn from
/// N(0, I4); the remainder follows forward and inverse dynamics.
GroundTruth generate_scenario2(std::uint64_t seed, std::uint64_t run, const MotionModel& motion,
                               int steps = 81);

/// Detections (probability pd, noise R) of targets alive at `scan` plus
/// Poisson clutter uniform on the region, in random order.
std::vector<Vec2> generate_measurements(const GroundTruth& gt, const MeasurementModel& meas,
                                        int scan, std::mt19937_64& rng);

}  // namespace mstraj
