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
#include <numbers>

#include "mstraj/errors.hpp"
#include "mstraj/models.hpp"

using namespace mstraj;

namespace {

Mat4 spd4() {
  Mat4 A;
  A << 2.0, 0.3, 0.1, 0.0,
       0.3, 1.5, 0.0, 0.2,
       0.1, 0.0, 3.0, 0.4,
       0.0, 0.2, 0.4, 1.2;
  return A;
}

}  // namespace

TEST(Models, ConstantVelocityMatrices) {
  const auto m = MotionModel::constant_velocity(2.0, 0.5, 0.9);
  Mat4 F;
  F << 1, 2, 0, 0, 0, 1, 0, 0, 0, 0, 1, 2, 0, 0, 0, 1;
  EXPECT_TRUE(m.F.isApprox(F));
  // q T^3/3, q T^2/2, q T for T = 2, q = 0.5.
  EXPECT_DOUBLE_EQ(m.Q(0, 0), 0.5 * 8.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.Q(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.Q(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.Q(2, 3), 1.0);
  EXPECT_DOUBLE_EQ(m.Q(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(m.ps, 0.9);
}

TEST(Models, PositionSensor) {
  const auto s = MeasurementModel::position_sensor(2.0, 0.9, 10.0);
  EXPECT_DOUBLE_EQ(s.H(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.H(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.H.sum(), 2.0);
  EXPECT_DOUBLE_EQ(s.R(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(s.clutter_density(), 10.0 / 40000.0);
}

TEST(Models, ChiSquareTwoDofHasClosedForm) {
  // For two degrees of freedom the CDF is 1 - exp(-x/2).
  EXPECT_NEAR(chi_square_quantile(0.999, 2), -2.0 * std::log(0.001), 1e-9);
  EXPECT_NEAR(chi_square_quantile(0.999, 2), 13.8155, 1e-4);
  EXPECT_NEAR(chi_square_quantile(0.5, 2), 2.0 * std::log(2.0), 1e-9);
}

TEST(Models, ChiSquareOneDof) {
  // x = z^2 for a standard normal z with P(|z| < 1.959963984540054) = 0.95.
  EXPECT_NEAR(chi_square_quantile(0.95, 1), 1.959963984540054 * 1.959963984540054, 1e-8);
}

TEST(Models, ChiSquareRejectsBadArguments) {
  EXPECT_THROW(chi_square_quantile(1.0, 2), ContractViolation);
  EXPECT_THROW(chi_square_quantile(0.5, 0), ContractViolation);
}

TEST(Models, PredictMatchesFormula) {
  const auto m = MotionModel::constant_velocity(1.0, 0.01, 0.99);
  const Vec4 x(1, 2, 3, 4);
  const GaussianState g(x, spd4());
  const GaussianState out = kalman_predict(g, m);
  EXPECT_TRUE(out.mean.isApprox(m.F * x));
  EXPECT_TRUE(out.cov.isApprox(m.F * spd4() * m.F.transpose() + m.Q, 1e-14));
}

TEST(Models, PredictRejectsStackedState) {
  const auto m = MotionModel::constant_velocity(1.0, 0.01, 0.99);
  GaussianState g(Eigen::VectorXd::Zero(8), Eigen::MatrixXd::Identity(8, 8));
  EXPECT_THROW(kalman_predict(g, m), ContractViolation);
}

TEST(Models, UpdateMatchesInformationForm) {
  const auto s = MeasurementModel::position_sensor(1.5, 0.9, 10.0);
  const Vec4 x(1, -1, 2, 0.5);
  const Vec2 z(1.7, 1.2);
  const KalmanUpdate u = kalman_update(GaussianState(x, spd4()), z, s);
  const Eigen::MatrixXd Pinv = spd4().inverse();
  const Eigen::MatrixXd Rinv = s.R.inverse();
  const Eigen::MatrixXd P_post = (Pinv + s.H.transpose() * Rinv * s.H).inverse();
  const Eigen::VectorXd m_post = P_post * (Pinv * x + s.H.transpose() * Rinv * z);
  EXPECT_TRUE(u.state.mean.isApprox(m_post, 1e-12));
  EXPECT_TRUE(u.state.cov.isApprox(P_post, 1e-12));

  const Eigen::Matrix2d S = s.H * spd4() * s.H.transpose() + s.R;
  const Eigen::Vector2d nu = z - s.H * x;
  const double dens = std::exp(-0.5 * nu.dot(S.inverse() * nu)) /
                      (2.0 * std::numbers::pi * std::sqrt(S.determinant()));
  EXPECT_NEAR(u.likelihood, dens, 1e-15);
  EXPECT_NEAR(u.log_likelihood, std::log(dens), 1e-12);
}

TEST(Models, StackedUpdateMatchesFullJointUpdate) {
  // Two stacked states with cross-covariance; the measurement sees the last.
  Eigen::MatrixXd P(8, 8);
  P.setZero();
  const auto m = MotionModel::constant_velocity(1.0, 0.3, 1.0);
  P.topLeftCorner(4, 4) = spd4();
  P.topRightCorner(4, 4) = spd4() * m.F.transpose();
  P.bottomLeftCorner(4, 4) = m.F * spd4();
  P.bottomRightCorner(4, 4) = m.F * spd4() * m.F.transpose() + m.Q;
  Eigen::VectorXd x(8);
  x << 1, 2, 3, 4, 3, 2, 7, 4;
  const auto s = MeasurementModel::position_sensor(1.0, 1.0, 1.0);
  const Vec2 z(2.5, 8.0);

  Eigen::MatrixXd Hf = Eigen::MatrixXd::Zero(2, 8);
  Hf.rightCols(4) = s.H;
  const Eigen::MatrixXd S = Hf * P * Hf.transpose() + s.R;
  const Eigen::MatrixXd K = P * Hf.transpose() * S.inverse();
  const Eigen::VectorXd m_post = x + K * (z - Hf * x);
  const Eigen::MatrixXd P_post = P - K * S * K.transpose();

  const KalmanUpdate u = kalman_update(GaussianState(x, P), z, s);
  EXPECT_TRUE(u.state.mean.isApprox(m_post, 1e-12));
  EXPECT_LT((u.state.cov - P_post).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Models, SingularInnovationThrows) {
  auto s = MeasurementModel::position_sensor(0.0, 1.0, 1.0);
  const GaussianState g(Vec4::Zero(), Mat4::Zero());
  EXPECT_THROW(kalman_update(g, Vec2(1, 1), s), NumericalFailure);
}

TEST(Models, PredictiveLikelihoodIntegratesToOne) {
  const auto s = MeasurementModel::position_sensor(1.0, 1.0, 1.0);
  const auto pred = predict_measurement(Vec4(3, 0, -2, 0), spd4(), s);
  // Midpoint rule over +-12 standard deviations.
  const double h = 0.05;
  double sum = 0.0;
  for (double a = -25.0; a < 25.0; a += h) {
    for (double b = -30.0; b < 30.0; b += h) {
      sum += std::exp(log_measurement_likelihood(Vec2(a + h / 2, b + h / 2), pred)) * h * h;
    }
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(Models, GateBoundary) {
  const auto s = MeasurementModel::position_sensor(1.0, 1.0, 1.0);
  const GaussianState g(Vec4::Zero(), Mat4::Zero());
  // Innovation covariance is the identity, so distance^2 = |z|^2.
  const double r = std::sqrt(-2.0 * std::log(0.001));
  EXPECT_TRUE(ellipsoidal_gate(Vec2(r - 1e-6, 0.0), g, s, 0.999));
  EXPECT_FALSE(ellipsoidal_gate(Vec2(0.0, r + 1e-6), g, s, 0.999));
  EXPECT_NEAR(mahalanobis_squared(Vec2(3, 4), predict_measurement(Vec4::Zero(), Mat4::Zero(), s)),
              25.0, 1e-12);
}

TEST(Models, BirthValidation) {
  BirthModel b;
  b.kind = BirthKind::kMultiBernoulli;
  b.components.push_back({1.5, Vec4::Zero(), Mat4::Identity()});
  EXPECT_THROW(b.validate(), ContractViolation);
  b.kind = BirthKind::kPoisson;
  EXPECT_NO_THROW(b.validate());
  b.components.front().weight = -1.0;
  EXPECT_THROW(b.validate(), ContractViolation);
}
