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

/// MBM: Bernoulli existence probabilities are arbitrary. MBM01: every local
/// hypothesis has r in {0, 1}; r = 0 is stored as an absent Bernoulli.
enum class MbmMode { kMbm, kMbm01 };

struct MbmPosterior {
  HypothesisForest forest;
  MbmMode mode = MbmMode::kMbm;
};

/// Predicts every leaf and adds one single-hypothesis track per birth
/// Bernoulli. Throws ModelMismatch for a Poisson birth model.
MbmPosterior mbm_predict(MbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                         const FilterSettings& s);

/// Misdetection child plus one detection child per gated measurement for
/// every leaf. No tracks are created.
MbmPosterior mbm_update(MbmPosterior p, const std::vector<Vec2>& scan,
                        const MeasurementModel& meas, const FilterSettings& s);

/// Current variant: every existing hypothesis splits into survival (r = 1)
/// and death (r = 0) children. All variant: hypotheses keep r and the
/// survival split lives inside the trajectory mixture. Births add a born
/// (w = r_b) and a not-born (w = 1 - r_b) hypothesis. Throws
/// ContractViolation if some r is not binary.
MbmPosterior mbm01_predict(MbmPosterior p, const MotionModel& motion, const BirthModel& birth,
                           const FilterSettings& s);

/// As mbm_update; r = 0 hypotheses get a single unchanged child.
MbmPosterior mbm01_update(MbmPosterior p, const std::vector<Vec2>& scan,
                          const MeasurementModel& meas, const FilterSettings& s);

}  // namespace mstraj
