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

// Leaf-level recursion steps shared by the PMBM and MBM families.

#include <vector>

#include "mstraj/filter.hpp"
#include "mstraj/hypothesis.hpp"

namespace mstraj::detail {

/// Predicts every leaf Bernoulli to time k (current or all trajectories).
void predict_leaves(HypothesisForest& f, const MotionModel& motion, int k,
                    const FilterSettings& s);

/// Replaces every leaf by its misdetection child and one detection child per
/// gated measurement. Absent Bernoullis pass through. Returns, per
/// measurement, whether any prior leaf produced a detection child.
std::vector<char> update_leaves(HypothesisForest& f, const std::vector<Vec2>& scan,
                                const MeasurementModel& meas, int k, const FilterSettings& s);

/// Records lineage for scan k, registers the scan and advances the clock.
void close_scan(HypothesisForest& f, int k, int count);

}  // namespace mstraj::detail
