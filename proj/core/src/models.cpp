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

#include "mstraj/models.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "mstraj/errors.hpp"

namespace mstraj {

MotionModel MotionModel::constant_velocity(double T, double q, double ps) {
  MotionModel m;
  Eigen::Matrix2d f;
  f << 1.0, T, 0.0, 1.0;
  Eigen::Matrix2d qb;
  qb << T * T * T / 3.0, T * T / 2.0, T * T / 2.0, T;
  m.F.setZero();
  m.Q.setZero();
  m.F.block<2, 2>(0, 0) = f;
  m.F.block<2, 2>(2, 2) = f;
  m.Q.block<2, 2>(0, 0) = q * qb;
  m.Q.block<2, 2>(2, 2) = q * qb;
  m.ps = ps;
  return m;
}

MeasurementModel MeasurementModel::position_sensor(double sigma, double pd,
                                                   double clutter_rate, Region region) {
  MeasurementModel m;
  m.H.setZero();
  m.H(0, 0) = 1.0;
  m.H(1, 2) = 1.0;
  m.R = sigma * sigma * Mat2::Identity();
  m.pd = pd;
  m.clutter_rate = clutter_rate;
  m.region = region;
  return m;
}

void BirthModel::validate() const {
  for (const auto& c : components) {
    MSTRAJ_EXPECT(c.weight >= 0.0, "birth weight must be non-negative");
    if (kind == BirthKind::kMultiBernoulli) {
      MSTRAJ_EXPECT(c.weight <= 1.0, "birth existence probability must lie in [0,1]");
    }
  }
}

GaussianState kalman_predict(const GaussianState& state, const MotionModel& model) {
  MSTRAJ_EXPECT(state.dim() == kStateDim, "kalman_predict expects a 4-dimensional state");
  const Vec4 m = state.mean;
  const Mat4 P = state.cov;
  Vec4 mp = model.F * m;
  Mat4 Pp = model.F * P * model.F.transpose() + model.Q;
  symmetrize(Pp);
  return {mp, Pp};
}

PredictedMeasurement predict_measurement(const Vec4& mean, const Mat4& cov,
                                         const MeasurementModel& model) {
  PredictedMeasurement pred;
  pred.mean = model.H * mean;
  pred.cov = model.H * cov * model.H.transpose() + model.R;
  return pred;
}

double mahalanobis_squared(const Vec2& z, const PredictedMeasurement& pred) {
  Eigen::LLT<Mat2> llt(pred.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("innovation covariance is not positive definite");
  }
  const Vec2 nu = z - pred.mean;
  return nu.dot(llt.solve(nu));
}

double log_measurement_likelihood(const Vec2& z, const PredictedMeasurement& pred) {
  const double det = pred.cov.determinant();
  if (!(det > 0.0)) throw NumericalFailure("innovation covariance is not positive definite");
  return -0.5 * mahalanobis_squared(z, pred) - std::log(2.0 * std::numbers::pi) -
         0.5 * std::log(det);
}

KalmanUpdate kalman_update(const GaussianState& state, const Vec2& z,
                           const MeasurementModel& model) {
  const int d = state.dim();
  MSTRAJ_EXPECT(d >= kStateDim && d % kStateDim == 0,
                "kalman_update expects a stack of 4-dimensional states");
  const int o = d - kStateDim;

  // The measured block is handled with fixed-size kernels only, so its
  // result does not depend on how many earlier blocks are stacked above it.
  const Vec4 m_l = state.mean.segment<kStateDim>(o);
  const Mat4 P_ll = state.cov.block<kStateDim, kStateDim>(o, o);
  const Mat24& H = model.H;
  const Mat2 S = H * P_ll * H.transpose() + model.R;
  Eigen::LLT<Mat2> llt(S);
  const double det = S.determinant();
  if (llt.info() != Eigen::Success || !(det > 0.0)) {
    throw NumericalFailure("innovation covariance is not positive definite");
  }
  const Mat2 S_inv = llt.solve(Mat2::Identity());
  const Vec2 nu = z - H * m_l;
  const Eigen::Matrix<double, 4, 2> K_l = P_ll * H.transpose() * S_inv;

  KalmanUpdate out;
  out.state.mean.resize(d);
  out.state.cov.resize(d, d);

  const Vec4 m_l_post = m_l + K_l * nu;
  const Mat4 IKH = Mat4::Identity() - K_l * H;
  Mat4 P_ll_post = IKH * P_ll * IKH.transpose() + K_l * model.R * K_l.transpose();
  symmetrize(P_ll_post);
  out.state.mean.segment<kStateDim>(o) = m_l_post;
  out.state.cov.block<kStateDim, kStateDim>(o, o) = P_ll_post;

  if (o > 0) {
    const Eigen::MatrixXd P_el = state.cov.block(0, o, o, kStateDim);
    const Eigen::MatrixXd K_e = P_el * H.transpose() * S_inv;
    out.state.mean.head(o) = state.mean.head(o) + K_e * nu;
    Eigen::MatrixXd P_ee = state.cov.topLeftCorner(o, o) - K_e * S * K_e.transpose();
    symmetrize(P_ee);
    out.state.cov.topLeftCorner(o, o) = P_ee;
    const Eigen::MatrixXd P_el_post = P_el - K_e * S * K_l.transpose();
    out.state.cov.block(0, o, o, kStateDim) = P_el_post;
    out.state.cov.block(o, 0, kStateDim, o) = P_el_post.transpose();
  }

  out.log_likelihood = -0.5 * nu.dot(S_inv * nu) - std::log(2.0 * std::numbers::pi) -
                       0.5 * std::log(det);
  out.likelihood = std::exp(out.log_likelihood);
  return out;
}

double chi_square_quantile(double prob, int dof) {
  MSTRAJ_EXPECT(prob > 0.0 && prob < 1.0, "chi-square quantile needs 0 < prob < 1");
  MSTRAJ_EXPECT(dof >= 1, "chi-square quantile needs dof >= 1");
  const double a = 0.5 * dof;
  auto cdf = [a](double x) { return boost::math::gamma_p(a, 0.5 * x); };
  double lo = 0.0;
  double hi = 1.0;
  while (cdf(hi) < prob) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double cached_gate_threshold(double prob) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(prob);
  if (it != cache.end()) return it->second;
  const double t = chi_square_quantile(prob, 2);
  cache.emplace(prob, t);
  return t;
}

}  // namespace

bool ellipsoidal_gate(const Vec2& z, const GaussianState& state,
                      const MeasurementModel& model, double prob) {
  MSTRAJ_EXPECT(prob > 0.0 && prob < 1.0, "gate probability must lie in (0,1)");
  const auto pred = predict_measurement(state.last_mean(), state.last_cov(), model);
  return mahalanobis_squared(z, pred) <= cached_gate_threshold(prob);
}

}  // namespace mstraj
