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

#include <vector>

#include "mstraj/filter.hpp"
#include "mstraj/hypothesis.hpp"
#include "mstraj/models.hpp"

namespace mstraj {

/// One Gaussian component of the undetected-trajectory intensity. The
/// trajectory starts at its birth time, so a first detection yields the
/// whole history since birth.
struct PoissonComponent {
  double w = 0.0;  // intensity mass
  TrajectoryGaussian traj;

  [[nodiscard]] int birth_time() const { return traj.beta; }
};

struct PoissonIntensity {
  std::vector<PoissonComponent> components;

  [[nodiscard]] double total_mass() const;
};

struct PmbmPosterior {
  PoissonIntensity undetected;
  HypothesisForest forest;
};

/// Poisson components are predicted (weight times ps) and the birth
/// intensity is appended; every leaf Bernoulli is predicted per variant.
/// Throws ModelMismatch for a multi-Bernoulli birth model.
PmbmPosterior pmbm_predict(PmbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                           const FilterSettings& s);

/// Misdetection/detection children for every leaf, thinning of the
/// undetected intensity and one new track per measurement.
PmbmPosterior pmbm_update(PmbmPosterior p, const std::vector<Vec2>& scan,
                          const MeasurementModel& meas, const FilterSettings& s);

}  // namespace mstraj
