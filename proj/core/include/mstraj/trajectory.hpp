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

#include "mstraj/models.hpp"

namespace mstraj {

/// Gaussian density of one trajectory with fixed birth time `beta` and end
/// time `eps`. Only the newest states are kept jointly; older states have
/// been frozen to their (smoothed) means.
struct TrajectoryGaussian {
  int beta = 0;
  int eps = 0;
  std::vector<Vec4> frozen_means;  // states beta .. eps - window()
  GaussianState joint;             // states eps - window() + 1 .. eps

  [[nodiscard]] int length() const { return eps - beta + 1; }
  [[nodiscard]] int window() const { return joint.blocks(); }
  [[nodiscard]] Vec4 last_mean() const { return joint.last_mean(); }
  [[nodiscard]] Mat4 last_cov() const { return joint.last_cov(); }

  /// Means of all states beta..eps (frozen followed by joint block means).
  [[nodiscard]] std::vector<Vec4> mean_sequence() const;
};

/// Single-state trajectory born (and ending) at time `t`.
TrajectoryGaussian make_trajectory(int t, const Vec4& mean, const Mat4& cov);

/// Appends the state at eps+1 using the motion model on the last block.
TrajectoryGaussian extend_trajectory(const TrajectoryGaussian& t, const MotionModel& motion);

/// Freezes the oldest joint blocks until at most `l_cap` remain.
TrajectoryGaussian lscan_truncate(TrajectoryGaussian t, int l_cap);

struct TrajectoryComponent {
  double w = 0.0;
  TrajectoryGaussian traj;
};

/// Weighted mixture over (beta, eps) hypotheses for one trajectory.
struct TrajectoryMixture {
  std::vector<TrajectoryComponent> components;

  [[nodiscard]] double total_weight() const;
  void normalize();
  /// Drops components below `min_weight` (keeping at least the heaviest) and
  /// renormalizes.
  void prune(double min_weight);
  [[nodiscard]] const TrajectoryComponent& heaviest() const;
};

struct BernoulliTrajectory {
  double r = 0.0;
  TrajectoryMixture mix;
};

struct TrajectorySettings {
  int l_cap = 7;                  // joint window, N + L
  double min_component_weight = 1e-4;
};

/// Single-component Bernoulli holding a fresh trajectory.
BernoulliTrajectory make_bernoulli(double r, TrajectoryGaussian traj);

/// A component is alive at time k iff its end time equals k.
[[nodiscard]] inline bool is_alive(const TrajectoryGaussian& t, int k) { return t.eps == k; }

/// Total weight of components alive at time k.
double alive_mass(const BernoulliTrajectory& b, int k);

/// Prediction for the set of current trajectories: r <- r ps and every
/// component is extended by one step.
BernoulliTrajectory predict_current(const BernoulliTrajectory& b, const MotionModel& motion,
                                    const TrajectorySettings& settings = {});

/// Prediction for the set of all trajectories to time k: r unchanged, each
/// component alive at k-1 splits into a dead copy (weight 1-ps) and an
/// extended copy (weight ps).
BernoulliTrajectory predict_all(const BernoulliTrajectory& b, const MotionModel& motion, int k,
                                const TrajectorySettings& settings = {});

struct BernoulliUpdate {
  BernoulliTrajectory bern;
  double log_weight_delta = 0.0;
};

/// Detection of the trajectory by z at time k. Only components alive at k
/// survive. The weight delta is log(r pd sum_j w_j l_j) - log lambda_FA.
/// Throws InvalidAssociation when nothing is alive.
BernoulliUpdate update_detect(const BernoulliTrajectory& b, const Vec2& z,
                              const MeasurementModel& meas, int k,
                              const TrajectorySettings& settings = {});

/// Misdetection at time k.
BernoulliUpdate update_miss(const BernoulliTrajectory& b, const MeasurementModel& meas, int k,
                            const TrajectorySettings& settings = {});

/// True iff z falls in the gate of at least one component alive at k.
bool gate_bernoulli(const BernoulliTrajectory& b, const Vec2& z, const MeasurementModel& meas,
                    int k, double gate_threshold);

}  // namespace mstraj
