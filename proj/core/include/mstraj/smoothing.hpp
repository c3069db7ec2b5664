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

#include "mstraj/hypothesis.hpp"

namespace mstraj {

/// Reported trajectory: state means for times beta..eps.
struct TrajectoryEstimate {
  TrackId track = 0;
  int beta = 0;
  int eps = 0;
  std::vector<Vec4> means;
};

/// argmax_n of the Poisson-binomial distribution of sum_i Bernoulli(r_i),
/// ties resolved towards the larger n.
int map_cardinality(const std::vector<double>& rs);

/// The n* Bernoullis of `a_star` with the highest existence probability
/// (ties by track id), each reported through its heaviest mixture component.
std::vector<TrajectoryEstimate> extract_estimates(const HypothesisForest& f,
                                                  const GlobalHypothesis& a_star);

/// Freezes, on every leaf, the joint blocks older than the (N+L)-state
/// window. The retained joint is already conditioned on all data, so the
/// frozen means are the fixed-lag smoothed means.
void fixed_lag_smooth(HypothesisForest& f, int l_cap);

}  // namespace mstraj
