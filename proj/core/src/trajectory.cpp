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

#include "mstraj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mstraj/errors.hpp"

namespace mstraj {

std::vector<Vec4> TrajectoryGaussian::mean_sequence() const {
  std::vector<Vec4> out = frozen_means;
  out.reserve(frozen_means.size() + window());
  for (int b = 0; b < window(); ++b) out.push_back(joint.block_mean(b));
  return out;
}

TrajectoryGaussian make_trajectory(int t, const Vec4& mean, const Mat4& cov) {
  TrajectoryGaussian tr;
  tr.beta = t;
  tr.eps = t;
  tr.joint = GaussianState(mean, cov);
  return tr;
}

TrajectoryGaussian extend_trajectory(const TrajectoryGaussian& t, const MotionModel& motion) {
  const int d = t.joint.dim();
  const int o = d - kStateDim;
  const GaussianState last(t.joint.mean.segment<kStateDim>(o),
                           t.joint.cov.block<kStateDim, kStateDim>(o, o));
  const GaussianState next = kalman_predict(last, motion);

  TrajectoryGaussian out;
  out.beta = t.beta;
  out.eps = t.eps + 1;
  out.frozen_means = t.frozen_means;
  out.joint.mean.resize(d + kStateDim);
  out.joint.cov.resize(d + kStateDim, d + kStateDim);
  out.joint.mean.head(d) = t.joint.mean;
  out.joint.mean.tail<kStateDim>() = next.mean;
  out.joint.cov.topLeftCorner(d, d) = t.joint.cov;
  const Eigen::MatrixXd cross = t.joint.cov.middleCols(o, kStateDim) * motion.F.transpose();
  out.joint.cov.topRightCorner(d, kStateDim) = cross;
  out.joint.cov.bottomLeftCorner(kStateDim, d) = cross.transpose();
  out.joint.cov.bottomRightCorner<kStateDim, kStateDim>() = next.cov;
  return out;
}

TrajectoryGaussian lscan_truncate(TrajectoryGaussian t, int l_cap) {
  MSTRAJ_EXPECT(l_cap >= 1, "L-scan window must be at least 1");
  const int excess = t.window() - l_cap;
  if (excess <= 0) return t;
  for (int b = 0; b < excess; ++b) t.frozen_means.push_back(t.joint.block_mean(b));
  const int keep = l_cap * kStateDim;
  const int off = excess * kStateDim;
  Eigen::VectorXd m = t.joint.mean.segment(off, keep);
  Eigen::MatrixXd P = t.joint.cov.block(off, off, keep, keep);
  t.joint = GaussianState(std::move(m), std::move(P));
  return t;
}

double TrajectoryMixture::total_weight() const {
  double s = 0.0;
  for (const auto& c : components) s += c.w;
  return s;
}

void TrajectoryMixture::normalize() {
  const double s = total_weight();
  if (!(s > 0.0)) return;
  for (auto& c : components) c.w /= s;
}

void TrajectoryMixture::prune(double min_weight) {
  if (components.empty()) return;
  normalize();
  const auto best = std::max_element(
      components.begin(), components.end(),
      [](const TrajectoryComponent& a, const TrajectoryComponent& b) { return a.w < b.w; });
  const double best_w = best->w;
  std::erase_if(components, [&](const TrajectoryComponent& c) {
    return c.w < min_weight && c.w < best_w;
  });
  normalize();
}

const TrajectoryComponent& TrajectoryMixture::heaviest() const {
  MSTRAJ_EXPECT(!components.empty(), "empty trajectory mixture");
  // First maximum wins, which keeps estimates deterministic on ties.
  const TrajectoryComponent* best = &components.front();
  for (const auto& c : components) {
    if (c.w > best->w) best = &c;
  }
  return *best;
}

BernoulliTrajectory make_bernoulli(double r, TrajectoryGaussian traj) {
  BernoulliTrajectory b;
  b.r = r;
  b.mix.components.push_back({1.0, std::move(traj)});
  return b;
}

double alive_mass(const BernoulliTrajectory& b, int k) {
  double q = 0.0;
  for (const auto& c : b.mix.components) {
    if (is_alive(c.traj, k)) q += c.w;
  }
  return q;
}

BernoulliTrajectory predict_current(const BernoulliTrajectory& b, const MotionModel& motion,
                                    const TrajectorySettings& settings) {
  BernoulliTrajectory out;
  out.r = b.r * motion.ps;
  out.mix.components.reserve(b.mix.components.size());
  for (const auto& c : b.mix.components) {
    out.mix.components.push_back(
        {c.w, lscan_truncate(extend_trajectory(c.traj, motion), settings.l_cap)});
  }
  return out;
}

BernoulliTrajectory predict_all(const BernoulliTrajectory& b, const MotionModel& motion, int k,
                                const TrajectorySettings& settings) {
  BernoulliTrajectory out;
  out.r = b.r;
  out.mix.components.reserve(2 * b.mix.components.size());
  for (const auto& c : b.mix.components) {
    if (is_alive(c.traj, k - 1)) {
      out.mix.components.push_back({c.w * (1.0 - motion.ps), c.traj});
      out.mix.components.push_back(
          {c.w * motion.ps, lscan_truncate(extend_trajectory(c.traj, motion), settings.l_cap)});
    } else {
      out.mix.components.push_back(c);
    }
  }
  out.mix.prune(settings.min_component_weight);
  return out;
}

BernoulliUpdate update_detect(const BernoulliTrajectory& b, const Vec2& z,
                              const MeasurementModel& meas, int k,
                              const TrajectorySettings& settings) {
  std::vector<double> log_w;
  BernoulliUpdate out;
  out.bern.r = 1.0;
  for (const auto& c : b.mix.components) {
    if (!is_alive(c.traj, k) || !(c.w > 0.0)) continue;
    KalmanUpdate ku = kalman_update(c.traj.joint, z, meas);
    TrajectoryGaussian t = c.traj;
    t.joint = std::move(ku.state);
    log_w.push_back(std::log(c.w) + ku.log_likelihood);
    out.bern.mix.components.push_back({0.0, std::move(t)});
  }
  if (log_w.empty()) {
    throw InvalidAssociation("detection of a trajectory with no alive component");
  }
  const double mx = *std::max_element(log_w.begin(), log_w.end());
  double s = 0.0;
  for (double lw : log_w) s += std::exp(lw - mx);
  const double lse = mx + std::log(s);
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    out.bern.mix.components[i].w = std::exp(log_w[i] - lse);
  }
  out.bern.mix.prune(settings.min_component_weight);
  out.log_weight_delta =
      std::log(b.r) + std::log(meas.pd) + lse - std::log(meas.clutter_density());
  return out;
}

BernoulliUpdate update_miss(const BernoulliTrajectory& b, const MeasurementModel& meas, int k,
                            const TrajectorySettings& settings) {
  const double q = alive_mass(b, k);
  const double den = 1.0 - b.r * meas.pd * q;
  BernoulliUpdate out;
  out.bern = b;
  if (!(den > 0.0)) {
    out.log_weight_delta = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_weight_delta = std::log(den);
  out.bern.r = b.r * (1.0 - meas.pd * q) / den;
  if (q > 0.0 && meas.pd > 0.0) {
    for (auto& c : out.bern.mix.components) {
      if (is_alive(c.traj, k)) c.w *= (1.0 - meas.pd);
    }
    if (out.bern.mix.total_weight() > 0.0) {
      out.bern.mix.prune(settings.min_component_weight);
    } else {
      out.bern.mix = b.mix;
    }
  }
  return out;
}

bool gate_bernoulli(const BernoulliTrajectory& b, const Vec2& z, const MeasurementModel& meas,
                    int k, double gate_threshold) {
  for (const auto& c : b.mix.components) {
    if (!is_alive(c.traj, k)) continue;
    const auto pred = predict_measurement(c.traj.last_mean(), c.traj.last_cov(), meas);
    if (mahalanobis_squared(z, pred) <= gate_threshold) return true;
  }
  return false;
}

}  // namespace mstraj
