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

// Single target, no clutter, unit detection probability: the trajectory
// reported by the tracker is compared with an independent Kalman filter and
// Rauch-Tung-Striebel smoother.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mstraj/scenario.hpp"
#include "mstraj/tracker.hpp"
#include "oracles.hpp"

namespace smoothcheck {

struct Result {
  bool single_estimate = false;  // exactly one trajectory, spanning 1..steps
  double max_err = oracle::kInfinity;
};

// `l_cap` is the joint window; states older than it are compared with the
// smoother run on the data available when they were frozen.
inline Result run(int steps, int l_cap, std::uint64_t seed) {
  const auto motion = mstraj::MotionModel::constant_velocity(1.0, 0.01, 0.99);
  auto meas = mstraj::MeasurementModel::position_sensor(1.0, 1.0, 1e-3);
  const mstraj::Vec4 m0(50, 0.5, 50, -0.5);
  const mstraj::Mat4 P0 = mstraj::Vec4(4, 1, 4, 1).asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  auto draw = [&](const Eigen::MatrixXd& L) {
    Eigen::VectorXd u(L.cols());
    for (int i = 0; i < u.size(); ++i) u[i] = n01(rng);
    return Eigen::VectorXd(L * u);
  };
  const Eigen::MatrixXd Lp = P0.llt().matrixL();
  const Eigen::MatrixXd Lq = motion.Q.llt().matrixL();
  const Eigen::MatrixXd Lr = meas.R.llt().matrixL();
  Eigen::VectorXd x = m0 + draw(Lp);
  std::vector<Eigen::Vector2d> z;
  for (int k = 1; k <= steps; ++k) {
    if (k > 1) x = motion.F * x + draw(Lq);
    z.push_back(meas.H * x + draw(Lr));
  }

  mstraj::TrackerConfig cfg;
  cfg.filter = mstraj::FilterKind::kPmbm;
  cfg.settings.variant = mstraj::Variant::kAll;
  cfg.settings.n_scan = 3;
  cfg.settings.traj.l_cap = l_cap;
  cfg.motion = motion;
  cfg.meas = meas;
  cfg.birth.kind = mstraj::BirthKind::kPoisson;
  cfg.birth.components.push_back({0.05, m0, P0});
  mstraj::Tracker tracker(cfg);
  mstraj::ScanOutput out;
  for (int k = 0; k < steps; ++k) out = tracker.step({z[k]});

  Result res;
  if (out.estimates.size() != 1) return res;
  const auto& e = out.estimates.front();
  if (e.beta != 1 || e.eps != steps || static_cast<int>(e.means.size()) != steps) return res;
  res.single_estimate = true;

  const oracle::LinearModel lm{motion.F, motion.Q, meas.H, meas.R};
  const auto full = oracle::rts_smoother(lm, m0, P0, z);
  res.max_err = 0.0;
  for (int t = 1; t <= steps; ++t) {
    // State t leaves the joint window at the prediction to t + l_cap.
    const int seen = std::min(steps, t + l_cap - 1);
    Eigen::VectorXd ref = full[t - 1];
    if (seen < steps) {
      const std::vector<Eigen::Vector2d> part(z.begin(), z.begin() + seen);
      ref = oracle::rts_smoother(lm, m0, P0, part)[t - 1];
    }
    res.max_err = std::max(res.max_err, (e.means[t - 1] - ref).cwiseAbs().maxCoeff());
  }
  return res;
}

}  // namespace smoothcheck
