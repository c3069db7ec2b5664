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

#include <gtest/gtest.h>

#include <cmath>

#include "mstraj/errors.hpp"
#include "mstraj/trajectory.hpp"

using namespace mstraj;

namespace {

const MotionModel kMotion = MotionModel::constant_velocity(1.0, 0.01, 0.99);
const MeasurementModel kSensor = MeasurementModel::position_sensor(1.0, 0.9, 10.0);

Mat4 cov0() { return Vec4(4, 1, 4, 1).asDiagonal(); }

}  // namespace

TEST(Trajectory, ExtendBuildsJointCovariance) {
  const auto t0 = make_trajectory(3, Vec4(1, 1, 0, 0), cov0());
  const auto t1 = extend_trajectory(t0, kMotion);
  EXPECT_EQ(t1.beta, 3);
  EXPECT_EQ(t1.eps, 4);
  EXPECT_EQ(t1.window(), 2);
  const Eigen::MatrixXd& P = t1.joint.cov;
  EXPECT_TRUE(P.topLeftCorner(4, 4).isApprox(cov0()));
  EXPECT_TRUE(P.topRightCorner(4, 4).isApprox(cov0() * kMotion.F.transpose()));
  EXPECT_TRUE(P.bottomLeftCorner(4, 4).isApprox(kMotion.F * cov0()));
  EXPECT_TRUE(P.bottomRightCorner(4, 4).isApprox(kMotion.F * cov0() * kMotion.F.transpose() +
                                                 kMotion.Q));
  EXPECT_TRUE(t1.last_mean().isApprox(kMotion.F * Vec4(1, 1, 0, 0)));
}

TEST(Trajectory, TruncateFreezesOldestMeans) {
  auto t = make_trajectory(1, Vec4(0, 1, 0, 2), cov0());
  for (int i = 0; i < 5; ++i) t = extend_trajectory(t, kMotion);
  ASSERT_EQ(t.window(), 6);
  const auto full = t.mean_sequence();
  const auto cut = lscan_truncate(t, 2);
  EXPECT_EQ(cut.window(), 2);
  ASSERT_EQ(cut.frozen_means.size(), 4u);
  const auto seq = cut.mean_sequence();
  ASSERT_EQ(seq.size(), full.size());
  for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_TRUE(seq[i].isApprox(full[i]));
  EXPECT_TRUE(cut.joint.cov.isApprox(t.joint.cov.bottomRightCorner(8, 8)));
  EXPECT_THROW(lscan_truncate(t, 0), ContractViolation);
}

TEST(Trajectory, PredictCurrentScalesExistence) {
  const auto b = make_bernoulli(0.8, make_trajectory(2, Vec4::Zero(), cov0()));
  const auto out = predict_current(b, kMotion);
  EXPECT_DOUBLE_EQ(out.r, 0.8 * 0.99);
  ASSERT_EQ(out.mix.components.size(), 1u);
  EXPECT_EQ(out.mix.components[0].traj.eps, 3);
}

TEST(Trajectory, PredictAllSplitsAliveComponents) {
  auto b = make_bernoulli(0.6, make_trajectory(2, Vec4::Zero(), cov0()));
  // A second component that ended earlier passes through untouched.
  b.mix.components[0].w = 0.75;
  b.mix.components.push_back({0.25, make_trajectory(1, Vec4::Ones(), cov0())});
  TrajectorySettings s;
  s.min_component_weight = 0.0;
  const auto out = predict_all(b, kMotion, 3, s);
  EXPECT_DOUBLE_EQ(out.r, 0.6);
  ASSERT_EQ(out.mix.components.size(), 3u);
  EXPECT_NEAR(out.mix.components[0].w, 0.75 * 0.01, 1e-15);
  EXPECT_EQ(out.mix.components[0].traj.eps, 2);
  EXPECT_NEAR(out.mix.components[1].w, 0.75 * 0.99, 1e-15);
  EXPECT_EQ(out.mix.components[1].traj.eps, 3);
  EXPECT_NEAR(out.mix.components[2].w, 0.25, 1e-15);
  EXPECT_EQ(out.mix.components[2].traj.eps, 1);
  EXPECT_NEAR(alive_mass(out, 3), 0.75 * 0.99, 1e-15);
}

TEST(Trajectory, MissUpdateFormula) {
  auto b = make_bernoulli(0.7, make_trajectory(3, Vec4::Zero(), cov0()));
  b.mix.components[0].w = 0.6;
  b.mix.components.push_back({0.4, make_trajectory(1, Vec4::Ones(), cov0())});
  TrajectorySettings s;
  s.min_component_weight = 0.0;
  const auto u = update_miss(b, kSensor, 3, s);
  const double q = 0.6;
  const double pd = kSensor.pd;
  EXPECT_NEAR(u.log_weight_delta, std::log(1.0 - 0.7 * pd * q), 1e-15);
  EXPECT_NEAR(u.bern.r, 0.7 * (1.0 - pd * q) / (1.0 - 0.7 * pd * q), 1e-15);
  const double a = 0.6 * (1.0 - pd);
  EXPECT_NEAR(u.bern.mix.components[0].w, a / (a + 0.4), 1e-15);
  EXPECT_NEAR(u.bern.mix.components[1].w, 0.4 / (a + 0.4), 1e-15);
}

TEST(Trajectory, MissOfCertainTargetWithUnitPdIsImpossible) {
  const auto b = make_bernoulli(1.0, make_trajectory(3, Vec4::Zero(), cov0()));
  auto sensor = kSensor;
  sensor.pd = 1.0;
  const auto u = update_miss(b, sensor, 3);
  EXPECT_TRUE(std::isinf(u.log_weight_delta));
  EXPECT_LT(u.log_weight_delta, 0.0);
}

TEST(Trajectory, DetectUpdateKeepsOnlyAliveComponents) {
  auto b = make_bernoulli(0.5, make_trajectory(3, Vec4(0, 0, 0, 0), cov0()));
  b.mix.components[0].w = 0.3;
  b.mix.components.push_back({0.5, make_trajectory(3, Vec4(2, 0, 1, 0), cov0())});
  b.mix.components.push_back({0.2, make_trajectory(2, Vec4(0, 0, 0, 0), cov0())});
  TrajectorySettings s;
  s.min_component_weight = 0.0;
  const Vec2 z(1.0, 0.5);
  const auto u = update_detect(b, z, kSensor, 3, s);
  EXPECT_DOUBLE_EQ(u.bern.r, 1.0);
  ASSERT_EQ(u.bern.mix.components.size(), 2u);

  auto lik = [&](const Vec4& m) {
    return std::exp(log_measurement_likelihood(z, predict_measurement(m, cov0(), kSensor)));
  };
  const double l0 = 0.3 * lik(Vec4(0, 0, 0, 0));
  const double l1 = 0.5 * lik(Vec4(2, 0, 1, 0));
  EXPECT_NEAR(u.log_weight_delta,
              std::log(0.5 * kSensor.pd * (l0 + l1)) - std::log(kSensor.clutter_density()), 1e-12);
  EXPECT_NEAR(u.bern.mix.components[0].w, l0 / (l0 + l1), 1e-12);
  for (const auto& c : u.bern.mix.components) EXPECT_EQ(c.traj.eps, 3);
}

TEST(Trajectory, DetectWithNothingAliveThrows) {
  const auto b = make_bernoulli(0.5, make_trajectory(1, Vec4::Zero(), cov0()));
  EXPECT_THROW(update_detect(b, Vec2::Zero(), kSensor, 3), InvalidAssociation);
}

TEST(Trajectory, PruneKeepsHeaviest) {
  TrajectoryMixture m;
  m.components.push_back({1e-6, make_trajectory(1, Vec4::Zero(), cov0())});
  m.components.push_back({2e-6, make_trajectory(2, Vec4::Zero(), cov0())});
  m.prune(0.5);
  ASSERT_EQ(m.components.size(), 1u);
  EXPECT_EQ(m.components[0].traj.beta, 2);
  EXPECT_DOUBLE_EQ(m.components[0].w, 1.0);
}

TEST(Trajectory, GateUsesAliveComponentsOnly) {
  auto b = make_bernoulli(1.0, make_trajectory(2, Vec4(50, 0, 50, 0), cov0()));
  const double thr = 13.8155;
  EXPECT_FALSE(gate_bernoulli(b, Vec2(50, 50), kSensor, 3, thr));
  EXPECT_TRUE(gate_bernoulli(b, Vec2(50, 50), kSensor, 2, thr));
  EXPECT_FALSE(gate_bernoulli(b, Vec2(70, 50), kSensor, 2, thr));
}
