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

#include <Eigen/Dense>

#include <vector>

namespace mstraj {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

// Dimension of a single kinematic state [px, vx, py, vy].
inline constexpr int kStateDim = 4;

/// Gaussian density. For trajectory joints the vector stacks consecutive
/// 4-dimensional states, oldest first.
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianState() = default;
  GaussianState(Eigen::VectorXd m, Eigen::MatrixXd p)
      : mean(std::move(m)), cov(std::move(p)) {}

  [[nodiscard]] int dim() const { return static_cast<int>(mean.size()); }
  [[nodiscard]] int blocks() const { return dim() / kStateDim; }
  [[nodiscard]] Vec4 block_mean(int b) const {
    return mean.segment<kStateDim>(b * kStateDim);
  }
  [[nodiscard]] Mat4 block_cov(int b) const {
    return cov.block<kStateDim, kStateDim>(b * kStateDim, b * kStateDim);
  }
  [[nodiscard]] Vec4 last_mean() const { return block_mean(blocks() - 1); }
  [[nodiscard]] Mat4 last_cov() const { return block_cov(blocks() - 1); }
};

struct MotionModel {
  Mat4 F = Mat4::Identity();
  Mat4 Q = Mat4::Zero();
  double ps = 1.0;

  /// Nearly-constant-velocity model: F = I2 (x) [[1,T],[0,1]],
  /// Q = q I2 (x) [[T^3/3, T^2/2],[T^2/2, T]].
  static MotionModel constant_velocity(double T, double q, double ps);
};

/// Axis-aligned rectangle in metres.
struct Region {
  double x_min = -100.0;
  double x_max = 100.0;
  double y_min = -100.0;
  double y_max = 100.0;

  [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
  [[nodiscard]] bool contains(const Vec2& z) const {
    return z.x() >= x_min && z.x() <= x_max && z.y() >= y_min && z.y() <= y_max;
  }
};

struct MeasurementModel {
  Mat24 H = Mat24::Zero();
  Mat2 R = Mat2::Identity();
  double pd = 1.0;
  double clutter_rate = 0.0;
  Region region;

  /// Uniform clutter intensity lambda_FA(z) = rate / area. The same value is
  /// used for measurements that fall outside the region.
  [[nodiscard]] double clutter_density() const { return clutter_rate / region.area(); }

  /// Position-only sensor: H = I2 (x) [1, 0], R = sigma^2 I2.
  static MeasurementModel position_sensor(double sigma, double pd, double clutter_rate,
                                          Region region = {});
};

enum class BirthKind { kPoisson, kMultiBernoulli };

/// One birth component. For Poisson births `weight` is an intensity mass;
/// for multi-Bernoulli births it is an existence probability.
struct BirthComponent {
  double weight = 0.0;
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();
};

struct BirthModel {
  BirthKind kind = BirthKind::kPoisson;
  std::vector<BirthComponent> components;

  void validate() const;
};

/// Time update of a single 4-dimensional state. Throws ContractViolation for
/// any other dimension.
GaussianState kalman_predict(const GaussianState& state, const MotionModel& model);

struct KalmanUpdate {
  GaussianState state;
  double likelihood = 0.0;      // N(z; H m, H P H' + R)
  double log_likelihood = 0.0;
};

/// Conditions the last state block of `state` on `z`; earlier blocks move
/// through their cross-covariance with the last block. Throws
/// NumericalFailure when the innovation covariance is not positive definite.
KalmanUpdate kalman_update(const GaussianState& state, const Vec2& z,
                           const MeasurementModel& model);

struct PredictedMeasurement {
  Vec2 mean;
  Mat2 cov;
};

PredictedMeasurement predict_measurement(const Vec4& mean, const Mat4& cov,
                                         const MeasurementModel& model);

/// Log of N(z; pred.mean, pred.cov).
double log_measurement_likelihood(const Vec2& z, const PredictedMeasurement& pred);

/// Squared Mahalanobis distance of z under the predicted measurement density.
double mahalanobis_squared(const Vec2& z, const PredictedMeasurement& pred);

/// Inverse CDF of the chi-square distribution, by bisection on the
/// regularized lower incomplete gamma function.
double chi_square_quantile(double prob, int dof);

/// True iff the squared Mahalanobis distance of z to the last state block's
/// predicted measurement is at most the chi-square(2) quantile at `prob`.
bool ellipsoidal_gate(const Vec2& z, const GaussianState& state,
                      const MeasurementModel& model, double prob);

/// Symmetrizes in place: P <- (P + P') / 2.
template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& P) {
  P = (0.5 * (P + P.transpose())).eval();
}

}  // namespace mstraj
